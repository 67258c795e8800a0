#include <doctest.h>

#include <algorithm>
#include <vector>

#include "revisit/corpus.hpp"
#include "revisit/rng.hpp"

using namespace revisit;

TEST_CASE("timeline counts, span, and intervals") {
    PairTimeline tl{{1, 2}, {0, 10, 20}};
    CHECK(tl.visit_count() == 3);
    CHECK(tl.return_count() == 2);
    CHECK(tl.span() == 20);
    CHECK(tl.intervals() == std::vector<Seconds>{10, 10});

    const auto stats = timeline_stats(tl);
    CHECK(stats.mean_interval == 10.0);
    CHECK(stats.tau_omega_product == 30.0);
    const auto exact = stats.mean_interval_exact();
    REQUIRE(exact.has_value());
    CHECK(exact->num == 20);
    CHECK(exact->den == 2);
}

TEST_CASE("single-visit timeline has no intervals and no mean") {
    PairTimeline tl{{1, 1}, {42}};
    CHECK(tl.return_count() == 0);
    CHECK(tl.span() == 0);
    CHECK(tl.intervals().empty());
    const auto stats = timeline_stats(tl);
    CHECK_FALSE(stats.mean_interval.has_value());
    CHECK_FALSE(stats.mean_interval_exact().has_value());
}

TEST_CASE("interval sum equals span exactly on random timelines") {
    SplitRng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        PairTimeline tl{{1, 1}, {}};
        const auto n = rng.uniform_int(2, 200);
        for (std::int64_t i = 0; i < n; ++i) tl.times.push_back(rng.uniform_int(0, 1000000000));
        std::sort(tl.times.begin(), tl.times.end());

        Seconds sum = 0;
        for (Seconds iv : tl.intervals()) sum += iv;
        CHECK(sum == tl.span());

        // <tau> * omega_r == span, as an exact rational identity
        const auto exact = timeline_stats(tl).mean_interval_exact();
        REQUIRE(exact.has_value());
        CHECK(exact->num == tl.span());
        CHECK(exact->den == static_cast<std::int64_t>(tl.return_count()));
    }
}

TEST_CASE("corpus build sorts, filters the window, and totals add up") {
    const Window w{100, 200};
    const std::vector<VisitEvent> events = {
        {1, 10, 150}, {1, 10, 120}, {1, 10, 150},  // tie at 150 is legal
        {1, 11, 180}, {2, 10, 199},
        {2, 10, 99},   // before window
        {3, 30, 201},  // after window
    };
    const Corpus corpus = build_corpus(events, w);

    CHECK(corpus.totals.requests == 5);
    CHECK(corpus.totals.pairs == 3);
    CHECK(corpus.totals.distinct_users == 2);
    CHECK(corpus.totals.distinct_urls == 2);
    CHECK(corpus.totals.out_of_window == 2);

    const auto* tl = corpus.find({1, 10});
    REQUIRE(tl != nullptr);
    CHECK(tl->times == std::vector<Seconds>{120, 150, 150});
    CHECK(corpus.find({3, 30}) == nullptr);

    CHECK(corpus.user_requests.at(1) == 4);
    CHECK(corpus.user_requests.at(2) == 1);
    CHECK(corpus.url_visits.at(10) == 4);
    CHECK(corpus.url_visits.at(11) == 1);

    // window bounds are inclusive
    CHECK(corpus.find({2, 10})->times == std::vector<Seconds>{199});
}

TEST_CASE("corpus construction is permutation invariant") {
    SplitRng rng(11);
    std::vector<VisitEvent> events;
    for (int i = 0; i < 300; ++i)
        events.push_back({static_cast<UserId>(rng.uniform_int(1, 5)),
                          static_cast<UrlId>(rng.uniform_int(1, 5)),
                          rng.uniform_int(0, 100000)});

    const Corpus a = build_corpus(events, {});
    std::reverse(events.begin(), events.end());
    const Corpus b = build_corpus(events, {});

    REQUIRE(a.totals.requests == b.totals.requests);
    REQUIRE(a.timelines.size() == b.timelines.size());
    for (const auto& [key, tl] : a.timelines) {
        const auto* other = b.find(key);
        REQUIRE(other != nullptr);
        CHECK(tl.times == other->times);
    }
}

TEST_CASE("builders over a partition merge to the same corpus") {
    SplitRng rng(13);
    std::vector<VisitEvent> events;
    for (int i = 0; i < 400; ++i)
        events.push_back({static_cast<UserId>(rng.uniform_int(1, 9)),
                          static_cast<UrlId>(rng.uniform_int(1, 3)),
                          rng.uniform_int(0, 5000)});

    const Window w{0, 4000};
    CorpusBuilder left(w), right(w);
    for (std::size_t i = 0; i < events.size(); ++i)
        (i % 2 == 0 ? left : right).add(events[i]);
    left.merge(std::move(right));
    const Corpus merged = std::move(left).finalize();
    const Corpus whole = build_corpus(events, w);

    CHECK(merged.totals.requests == whole.totals.requests);
    CHECK(merged.totals.out_of_window == whole.totals.out_of_window);
    REQUIRE(merged.timelines.size() == whole.timelines.size());
    for (const auto& [key, tl] : whole.timelines) {
        const auto* other = merged.find(key);
        REQUIRE(other != nullptr);
        CHECK(tl.times == other->times);
    }
}

TEST_CASE("builder rejects inverted windows and mismatched merges") {
    CHECK_THROWS_AS(CorpusBuilder({10, 5}), ParamError);
    CorpusBuilder a({0, 10});
    CorpusBuilder b({0, 11});
    CHECK_THROWS_AS(a.merge(std::move(b)), ParamError);
}

TEST_CASE("activity profile covers the span with zero bins") {
    PairTimeline tl{{1, 1}, {5, 12, 19, 33}};
    const auto profile = activity_profile(tl, 10);
    REQUIRE(profile.size() == 4);
    CHECK(profile[0] == ActivityBin{0, 1});
    CHECK(profile[1] == ActivityBin{10, 2});
    CHECK(profile[2] == ActivityBin{20, 0});
    CHECK(profile[3] == ActivityBin{30, 1});

    std::uint64_t total = 0;
    for (const auto& b : profile) total += b.visits;
    CHECK(total == tl.visit_count());

    CHECK_THROWS_AS(activity_profile(tl, 0), ParamError);
    CHECK(activity_profile({{1, 1}, {}}, 10).empty());
}
