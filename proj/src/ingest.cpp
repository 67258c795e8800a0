#include "revisit/ingest.hpp"

#include <sodium.h>

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>

namespace revisit {

namespace {

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw IoError("libsodium initialization failed");
}

std::uint64_t truncate64(const unsigned char* digest) {
    std::uint64_t x = 0;
    for (int i = 7; i >= 0; --i) x = (x << 8) | digest[i];  // little-endian read
    return x;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_i64(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

int month_number(std::string_view m) {
    static constexpr std::string_view names[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (int i = 0; i < 12; ++i)
        if (m == names[i]) return i + 1;
    return 0;
}

// civil date -> days since 1970-01-01 (Gregorian, proleptic)
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const auto doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// `dd/Mon/yyyy:HH:MM:SS +zzzz` -> epoch seconds, honoring the zone offset
bool parse_clf_timestamp(std::string_view s, Seconds& out) {
    // fixed layout: positions are rigid in the combined format
    if (s.size() != 26 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' ||
        s[17] != ':' || s[20] != ' ')
        return false;
    std::int64_t day, year, hh, mm, ss, off_h, off_m;
    if (!parse_i64(s.substr(0, 2), day) || !parse_i64(s.substr(7, 4), year) ||
        !parse_i64(s.substr(12, 2), hh) || !parse_i64(s.substr(15, 2), mm) ||
        !parse_i64(s.substr(18, 2), ss))
        return false;
    const int month = month_number(s.substr(3, 3));
    if (month == 0 || day < 1 || day > 31 || hh > 23 || mm > 59 || ss > 60) return false;
    const char sign = s[21];
    if (sign != '+' && sign != '-') return false;
    if (!parse_i64(s.substr(22, 2), off_h) || !parse_i64(s.substr(24, 2), off_m)) return false;
    const std::int64_t offset = (sign == '-' ? -1 : 1) * (off_h * 3600 + off_m * 60);
    out = days_from_civil(year, month, static_cast<int>(day)) * 86400 + hh * 3600 + mm * 60 + ss -
          offset;
    return true;
}

// token up to the next space; advances past the space
bool next_token(std::string_view& rest, std::string_view& tok) {
    if (rest.empty()) return false;
    const auto sp = rest.find(' ');
    if (sp == std::string_view::npos) {
        tok = rest;
        rest = {};
    } else {
        tok = rest.substr(0, sp);
        rest.remove_prefix(sp + 1);
    }
    return !tok.empty();
}

// delimited field (e.g. [..] or ".."); advances past the closer and one
// space; a backslash-escaped closer does not terminate the field
bool next_delimited(std::string_view& rest, char open, char close, std::string_view& field) {
    if (rest.empty() || rest.front() != open) return false;
    std::size_t end = 0;
    for (std::size_t i = 1; i < rest.size(); ++i) {
        if (rest[i] == '\\') {
            ++i;  // skip the escaped character
            continue;
        }
        if (rest[i] == close) {
            end = i;
            break;
        }
    }
    if (end == 0) return false;
    field = rest.substr(1, end - 1);
    rest.remove_prefix(end + 1);
    if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    return true;
}

}  // namespace

AnonymizationKey AnonymizationKey::from_bytes(std::string_view salt) {
    ensure_sodium();
    if (salt.size() < 16) throw ParamError("anonymization salt must be at least 16 bytes");
    AnonymizationKey key;
    crypto_generichash(key.key_.data(), key.key_.size(),
                       reinterpret_cast<const unsigned char*>(salt.data()), salt.size(), nullptr,
                       0);
    return key;
}

AnonymizationKey AnonymizationKey::from_env(const char* variable) {
    const char* value = std::getenv(variable);
    if (value == nullptr || *value == '\0')
        throw ParamError(std::string("salt environment variable not set: ") + variable);
    return from_bytes(value);
}

AnonymizationKey AnonymizationKey::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open salt file: " + path);
    std::string salt((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!salt.empty() && salt.back() == '\n') salt.pop_back();
    if (!salt.empty() && salt.back() == '\r') salt.pop_back();
    return from_bytes(salt);
}

UserId AnonymizationKey::user_id(std::string_view host, std::string_view agent) const {
    crypto_generichash_state state;
    unsigned char digest[crypto_generichash_BYTES];
    crypto_generichash_init(&state, key_.data(), key_.size(), sizeof digest);
    const unsigned char tag = 'U';
    crypto_generichash_update(&state, &tag, 1);
    crypto_generichash_update(&state, reinterpret_cast<const unsigned char*>(host.data()),
                              host.size());
    const unsigned char sep = '\n';  // keeps (host, agent) boundaries unambiguous
    crypto_generichash_update(&state, &sep, 1);
    crypto_generichash_update(&state, reinterpret_cast<const unsigned char*>(agent.data()),
                              agent.size());
    crypto_generichash_final(&state, digest, sizeof digest);
    return truncate64(digest);
}

UrlId AnonymizationKey::url_id(std::string_view path) const {
    crypto_generichash_state state;
    unsigned char digest[crypto_generichash_BYTES];
    crypto_generichash_init(&state, key_.data(), key_.size(), sizeof digest);
    const unsigned char tag = 'P';
    crypto_generichash_update(&state, &tag, 1);
    crypto_generichash_update(&state, reinterpret_cast<const unsigned char*>(path.data()),
                              path.size());
    crypto_generichash_final(&state, digest, sizeof digest);
    return truncate64(digest);
}

ParseResult parse_tsv(std::string_view line) {
    line = strip_cr(line);
    const auto tab1 = line.find('\t');
    if (tab1 == std::string_view::npos) return MalformedLine{"expected 3 tab-separated fields"};
    const auto tab2 = line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) return MalformedLine{"expected 3 tab-separated fields"};
    if (line.find('\t', tab2 + 1) != std::string_view::npos)
        return MalformedLine{"expected 3 tab-separated fields"};

    Seconds t;
    UserId user;
    UrlId url;
    if (!parse_i64(line.substr(0, tab1), t)) return MalformedLine{"non-integer timestamp"};
    if (t < 0) return MalformedLine{"negative timestamp"};
    if (!parse_u64(line.substr(tab1 + 1, tab2 - tab1 - 1), user))
        return MalformedLine{"non-integer user id"};
    if (!parse_u64(line.substr(tab2 + 1), url)) return MalformedLine{"non-integer url id"};
    return VisitEvent{user, url, t};
}

ParseResult parse_combined_log(std::string_view line, const AnonymizationKey& key, UrlMode mode) {
    std::string_view rest = strip_cr(line);
    std::string_view host, ident, authuser, ts, request, status, size, referer, agent;
    if (!next_token(rest, host)) return MalformedLine{"missing host"};
    if (!next_token(rest, ident) || !next_token(rest, authuser))
        return MalformedLine{"missing identity fields"};
    if (!next_delimited(rest, '[', ']', ts)) return MalformedLine{"missing bracketed timestamp"};
    if (!next_delimited(rest, '"', '"', request)) return MalformedLine{"unbalanced request quotes"};
    if (!next_token(rest, status) || !next_token(rest, size))
        return MalformedLine{"missing status or size"};
    if (!next_delimited(rest, '"', '"', referer)) return MalformedLine{"unbalanced referer quotes"};
    if (!next_delimited(rest, '"', '"', agent)) return MalformedLine{"unbalanced agent quotes"};

    Seconds t;
    if (!parse_clf_timestamp(ts, t)) return MalformedLine{"malformed timestamp"};
    if (t < 0) return MalformedLine{"negative timestamp"};

    // request = METHOD SP path SP protocol
    const auto sp1 = request.find(' ');
    const auto sp2 = request.rfind(' ');
    if (sp1 == std::string_view::npos || sp2 == sp1)
        return MalformedLine{"malformed request field"};
    std::string_view path = request.substr(sp1 + 1, sp2 - sp1 - 1);
    if (path.empty()) return MalformedLine{"empty request path"};
    if (mode == UrlMode::PathOnly) {
        if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
    }

    return VisitEvent{key.user_id(host, agent), key.url_id(path), t};
}

IngestReport stream_ingest(std::istream& in, LogFormat format, const AnonymizationKey* key,
                           Window window, const std::function<void(const VisitEvent&)>& sink,
                           UrlMode mode) {
    if (format == LogFormat::Combined && key == nullptr)
        throw ParamError("combined-log ingestion requires an anonymization key");

    IngestReport report;
    std::string line;
    while (std::getline(in, line)) {
        ++report.lines_read;
        const ParseResult parsed = format == LogFormat::Tsv ? parse_tsv(line)
                                                            : parse_combined_log(line, *key, mode);
        if (std::holds_alternative<MalformedLine>(parsed)) {
            ++report.malformed_count;
            continue;
        }
        const auto& event = std::get<VisitEvent>(parsed);
        if (!window.contains(event.t)) {
            ++report.out_of_window_count;
            continue;
        }
        ++report.events_emitted;
        sink(event);
    }
    if (in.bad()) throw IoError("log source failed mid-read");
    return report;
}

}  // namespace revisit
