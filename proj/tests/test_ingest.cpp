#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revisit/ingest.hpp"
#include "revisit/rng.hpp"

using namespace revisit;

namespace {

const std::string kSalt = "correct horse battery staple";

VisitEvent expect_event(const ParseResult& r) {
    REQUIRE(std::holds_alternative<VisitEvent>(r));
    return std::get<VisitEvent>(r);
}

std::string expect_malformed(const ParseResult& r) {
    REQUIRE(std::holds_alternative<MalformedLine>(r));
    return std::get<MalformedLine>(r).reason;
}

const char* kCombined =
    "203.0.113.9 - - [01/Apr/2005:00:00:00 -0400] \"GET /index.html HTTP/1.1\" "
    "200 1043 \"-\" \"Mozilla/5.0\"";

}  // namespace

TEST_CASE("canonical TSV lines parse by position") {
    const VisitEvent e = expect_event(parse_tsv("1112345678\t42\t7"));
    CHECK(e.t == 1112345678);
    CHECK(e.user == 42);
    CHECK(e.url == 7);

    // one trailing carriage return is tolerated
    const VisitEvent crlf = expect_event(parse_tsv("5\t1\t2\r"));
    CHECK(crlf.t == 5);

    expect_malformed(parse_tsv(""));
    expect_malformed(parse_tsv("1112345678\t42"));
    expect_malformed(parse_tsv("1112345678\t42\t7\t9"));
    expect_malformed(parse_tsv("abc\t42\t7"));
    expect_malformed(parse_tsv("1112345678\t-42\t7"));
    expect_malformed(parse_tsv("1112345678\t42\t7junk"));
    expect_malformed(parse_tsv("-5\t42\t7"));
}

TEST_CASE("salts must be long enough and drive the hash") {
    CHECK_THROWS_AS(AnonymizationKey::from_bytes("shortsalt"), ParamError);

    const auto key = AnonymizationKey::from_bytes(kSalt);
    const auto same = AnonymizationKey::from_bytes(kSalt);
    const auto other = AnonymizationKey::from_bytes("a completely different salt!");

    CHECK(key.user_id("host.example", "agent") == same.user_id("host.example", "agent"));
    CHECK(key.user_id("host.example", "agent") != other.user_id("host.example", "agent"));
    CHECK(key.url_id("/a/b") == same.url_id("/a/b"));
    CHECK(key.url_id("/a/b") != other.url_id("/a/b"));
}

TEST_CASE("identity derivation separates domains and fields") {
    const auto key = AnonymizationKey::from_bytes(kSalt);
    // user and url spaces must not collide even on identical raw strings
    CHECK(key.user_id("/a/b", "") != key.url_id("/a/b"));
    // host/agent boundary is part of the hash, not mere concatenation
    CHECK(key.user_id("ab", "c") != key.user_id("a", "bc"));
    CHECK(key.user_id("ab", "c") != key.user_id("ab", "d"));
}

TEST_CASE("salt loads from the environment and from files") {
    REQUIRE(setenv("REVISIT_TEST_SALT", kSalt.c_str(), 1) == 0);
    const auto env_key = AnonymizationKey::from_env("REVISIT_TEST_SALT");
    const auto byte_key = AnonymizationKey::from_bytes(kSalt);
    CHECK(env_key.user_id("h", "a") == byte_key.user_id("h", "a"));
    unsetenv("REVISIT_TEST_SALT");
    CHECK_THROWS_AS(AnonymizationKey::from_env("REVISIT_TEST_SALT"), ParamError);

    const std::string path = "salt_test_file.txt";
    {
        std::ofstream out(path, std::ios::binary);
        out << kSalt << "\n";  // trailing newline must be ignored
    }
    const auto file_key = AnonymizationKey::from_file(path);
    CHECK(file_key.user_id("h", "a") == byte_key.user_id("h", "a"));
    std::remove(path.c_str());
    CHECK_THROWS_AS(AnonymizationKey::from_file(path), IoError);
}

TEST_CASE("combined log timestamps convert to epoch seconds exactly") {
    const auto key = AnonymizationKey::from_bytes(kSalt);
    const VisitEvent e = expect_event(parse_combined_log(kCombined, key));
    // 2005-04-01 00:00:00 -0400 == 2005-04-01 04:00:00 UTC
    CHECK(e.t == 1112328000);
    CHECK(e.user == key.user_id("203.0.113.9", "Mozilla/5.0"));
    CHECK(e.url == key.url_id("/index.html"));
}

TEST_CASE("positive zone offsets subtract from UTC") {
    const auto key = AnonymizationKey::from_bytes(kSalt);
    const std::string line =
        "h - - [01/Jan/2020:12:30:00 +0130] \"GET /x HTTP/1.0\" 200 1 \"-\" \"ua\"";
    const VisitEvent e = expect_event(parse_combined_log(line, key));
    CHECK(e.t == 1577876400);  // 2020-01-01 12:30 at +0130 == 11:00:00 UTC
}

TEST_CASE("query strings are stripped only in path-only mode") {
    const auto key = AnonymizationKey::from_bytes(kSalt);
    const std::string line =
        "h - - [01/Apr/2005:00:00:00 -0400] \"GET /s?q=1 HTTP/1.1\" 200 5 \"-\" \"ua\"";
    const VisitEvent stripped = expect_event(parse_combined_log(line, key, UrlMode::PathOnly));
    CHECK(stripped.url == key.url_id("/s"));
    const VisitEvent full = expect_event(parse_combined_log(line, key, UrlMode::Full));
    CHECK(full.url == key.url_id("/s?q=1"));
    CHECK(stripped.url != full.url);
}

TEST_CASE("escaped quotes inside quoted fields survive") {
    const auto key = AnonymizationKey::from_bytes(kSalt);
    const std::string line =
        "h - - [01/Apr/2005:00:00:00 -0400] \"GET /p HTTP/1.1\" 200 5 \"-\" "
        "\"agent \\\"quoted\\\" tail\"";
    const VisitEvent e = expect_event(parse_combined_log(line, key));
    CHECK(e.user == key.user_id("h", "agent \\\"quoted\\\" tail"));
}

TEST_CASE("malformed combined lines name their defect") {
    const auto key = AnonymizationKey::from_bytes(kSalt);
    CHECK(!expect_malformed(parse_combined_log("", key)).empty());
    CHECK(!expect_malformed(parse_combined_log("onlyhost", key)).empty());
    CHECK(!expect_malformed(
               parse_combined_log("h - - 01/Apr/2005:00:00:00 -0400 \"GET / HTTP/1.1\" 200 1 "
                                  "\"-\" \"ua\"",
                                  key))
               .empty());  // missing brackets
    CHECK(!expect_malformed(
               parse_combined_log("h - - [01/Ggg/2005:00:00:00 -0400] \"GET / HTTP/1.1\" 200 1 "
                                  "\"-\" \"ua\"",
                                  key))
               .empty());  // bad month
    CHECK(!expect_malformed(
               parse_combined_log("h - - [01/Apr/2005:00:00] \"GET / HTTP/1.1\" 200 1 \"-\" "
                                  "\"ua\"",
                                  key))
               .empty());  // truncated timestamp
    CHECK(!expect_malformed(
               parse_combined_log("h - - [01/Apr/2005:00:00:00 -0400] \"BARE\" 200 1 \"-\" "
                                  "\"ua\"",
                                  key))
               .empty());  // request without method/protocol
}

TEST_CASE("streaming ingest buckets every line exactly once") {
    std::istringstream in(
        "100\t1\t1\n"
        "garbage line\n"
        "200\t1\t1\n"
        "5000000\t2\t2\n"  // beyond window
        "300\t3\t9\n");
    std::vector<VisitEvent> events;
    const IngestReport report =
        stream_ingest(in, LogFormat::Tsv, nullptr, {0, 1000000},
                      [&](const VisitEvent& e) { events.push_back(e); });

    CHECK(report.lines_read == 5);
    CHECK(report.events_emitted == 3);
    CHECK(report.malformed_count == 1);
    CHECK(report.out_of_window_count == 1);
    CHECK(report.lines_read == report.events_emitted + report.malformed_count +
                                   report.out_of_window_count);
    REQUIRE(events.size() == 3);
    CHECK(events[0].t == 100);
    CHECK(events[2].url == 9);
}

TEST_CASE("streaming ingest accounting holds on random noise") {
    SplitRng rng(66);
    std::ostringstream src;
    std::uint64_t lines = 0;
    for (int i = 0; i < 500; ++i, ++lines) {
        switch (rng.uniform_int(0, 3)) {
            case 0: src << rng.uniform_int(0, 2000000) << '\t' << rng.uniform_int(1, 9) << '\t'
                        << rng.uniform_int(1, 9) << '\n'; break;
            case 1: src << "not a line " << i << '\n'; break;
            case 2: src << rng.uniform_int(0, 100) << '\t' << i << '\n'; break;  // two fields
            default: src << '\n'; break;
        }
    }
    std::istringstream in(src.str());
    std::uint64_t emitted = 0;
    const IngestReport report = stream_ingest(in, LogFormat::Tsv, nullptr, {0, 1000000},
                                              [&](const VisitEvent&) { ++emitted; });
    CHECK(report.lines_read == lines);
    CHECK(report.events_emitted == emitted);
    CHECK(report.lines_read ==
          report.events_emitted + report.malformed_count + report.out_of_window_count);
}

TEST_CASE("empty input yields an empty report, broken streams throw") {
    std::istringstream empty("");
    const IngestReport report = stream_ingest(empty, LogFormat::Tsv, nullptr, {0, 100},
                                              [](const VisitEvent&) {});
    CHECK(report.lines_read == 0);
    CHECK(report.events_emitted == 0);

    std::istringstream broken("1\t2\t3\n");
    broken.setstate(std::ios::badbit);
    CHECK_THROWS_AS(stream_ingest(broken, LogFormat::Tsv, nullptr, {0, 100},
                                  [](const VisitEvent&) {}),
                    IoError);
}

TEST_CASE("combined-format streaming requires a key and applies it") {
    const auto key = AnonymizationKey::from_bytes(kSalt);
    std::istringstream in(std::string(kCombined) + "\n");
    std::vector<VisitEvent> events;
    stream_ingest(in, LogFormat::Combined, &key, {0, 2000000000},
                  [&](const VisitEvent& e) { events.push_back(e); });
    REQUIRE(events.size() == 1);
    CHECK(events[0].t == 1112328000);

    std::istringstream again(std::string(kCombined) + "\n");
    CHECK_THROWS_AS(stream_ingest(again, LogFormat::Combined, nullptr, {0, 2000000000},
                                  [](const VisitEvent&) {}),
                    ParamError);
}
