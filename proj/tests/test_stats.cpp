#include <doctest.h>

#include <cmath>
#include <vector>

#include "revisit/corpus.hpp"
#include "revisit/rng.hpp"
#include "revisit/stats.hpp"
#include "revisit/synthgen.hpp"

using namespace revisit;

namespace {

Corpus corpus_of(std::vector<VisitEvent> events, Window w = {0, 1000000}) {
    return build_corpus(events, w);
}

std::vector<VisitEvent> pair_events(UserId user, const std::vector<Seconds>& times) {
    std::vector<VisitEvent> events;
    for (Seconds t : times) events.push_back({user, user, t});
    return events;
}

}  // namespace

TEST_CASE("visit histogram separates single visits from recurrences") {
    std::vector<VisitEvent> events = pair_events(1, {10});
    for (const auto& e : pair_events(2, {10, 20})) events.push_back(e);
    for (const auto& e : pair_events(3, {10, 30})) events.push_back(e);
    const Corpus c = corpus_of(events);

    const LogHistogram visits = visits_histogram(c, OmegaKind::Visits);
    CHECK(visits.total_in_support() == 3);
    CHECK(visits.zero_count() == 0);

    const LogHistogram returns = visits_histogram(c, OmegaKind::Returns);
    CHECK(returns.total_in_support() == 2);  // two pairs with one return each
    CHECK(returns.zero_count() == 1);        // the single-visit pair

    CHECK_THROWS_AS(visits_histogram(corpus_of({}), OmegaKind::Visits), EmptyResultError);
}

TEST_CASE("single-visit fraction is singles over total requests") {
    CHECK(*single_visit_fraction(corpus_of(pair_events(1, {5}))) == doctest::Approx(1.0));

    std::vector<VisitEvent> events = pair_events(1, {5});
    for (const auto& e : pair_events(2, {1, 2, 3, 4})) events.push_back(e);
    CHECK(*single_visit_fraction(corpus_of(events)) == doctest::Approx(0.2));

    CHECK(!single_visit_fraction(corpus_of({})).has_value());
}

TEST_CASE("pooled intervals honor cohorts and masks") {
    std::vector<VisitEvent> events;
    std::vector<Seconds> heavy;
    for (int i = 0; i < 50; ++i) heavy.push_back(i * 100);
    for (const auto& e : pair_events(1, heavy)) events.push_back(e);       // 50 requests
    for (const auto& e : pair_events(2, {0, 10, 20})) events.push_back(e); // 3 requests
    const Corpus c = corpus_of(events);

    CHECK(pooled_intervals(c).size() == 49 + 2);

    CohortFilter light{CohortKind::UserActivity, 10, {}};
    const auto filtered = pooled_intervals(c, &light);
    CHECK(filtered == std::vector<Seconds>{10, 10});

    CohortFilter popular{CohortKind::UrlPopularity, {}, 10};
    CHECK(pooled_intervals(c, &popular).size() == 49);

    PairKeySet mask;
    mask.insert(PairKey{1, 1});
    CHECK(pooled_intervals(c, nullptr, &mask) == std::vector<Seconds>{10, 10});

    CohortFilter zero{CohortKind::UserActivity, 0, {}};
    CHECK_THROWS_AS(pooled_intervals(c, &zero), ParamError);
}

TEST_CASE("pooled interval count grows monotonically with the activity cap") {
    SplitRng rng(2026);
    std::vector<VisitEvent> events;
    for (UserId u = 1; u <= 60; ++u) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 40));
        for (std::size_t i = 0; i < n; ++i)
            events.push_back({u, u, rng.uniform_int(0, 999999)});
    }
    const Corpus c = corpus_of(events);
    std::size_t prev = 0;
    for (std::uint64_t cap = 1; cap <= 45; ++cap) {
        CohortFilter f{CohortKind::UserActivity, cap, {}};
        const std::size_t n = pooled_intervals(c, &f).size();
        CHECK(n >= prev);
        prev = n;
    }
    CHECK(prev == pooled_intervals(c).size());
}

TEST_CASE("intervisit distribution routes ties to the zero tally") {
    const Corpus c = corpus_of(pair_events(1, {5, 5, 7}));
    const LogHistogram h = intervisit_distribution(c);
    CHECK(h.zero_count() == 1);
    CHECK(h.total_in_support() == 1);

    const Corpus plain = corpus_of(pair_events(1, {0, 10, 20}));
    const LogHistogram h2 = intervisit_distribution(plain);
    CHECK(h2.total_in_support() == 2);
    const auto idx = h2.bin_index(10.0);
    REQUIRE(idx.has_value());
    CHECK(h2.count(*idx) == 2);

    CHECK_THROWS_AS(intervisit_distribution(corpus_of(pair_events(1, {5}))), EmptyResultError);
}

TEST_CASE("return curve fractions match a constructed mixture exactly") {
    std::vector<Seconds> times{0};
    for (int i = 0; i < 30; ++i) times.push_back(300);
    for (int i = 0; i < 10; ++i) times.push_back(3000);
    for (int i = 0; i < 60; ++i) times.push_back(100000);
    const Corpus c = corpus_of(pair_events(1, times), {0, 200000});

    const ReturnCurve curve = return_probability(c);
    CHECK(curve.total_returns == 100);
    CHECK(curve.zero_delays == 0);
    REQUIRE(curve.fractions.size() == 3);
    CHECK(curve.fractions[0] == doctest::Approx(0.30));
    CHECK(curve.fractions[1] == doctest::Approx(0.10));
    CHECK(curve.fractions[2] == doctest::Approx(0.60));
    CHECK(curve.fractions[0] + curve.fractions[1] + curve.fractions[2] == doctest::Approx(1.0));
    CHECK(curve.breakpoints == std::vector<Seconds>{600, 57600});
}

TEST_CASE("regime boundaries are inclusive on the left regime") {
    const Corpus c = corpus_of(pair_events(1, {0, 600, 57600, 57601}), {0, 100000});
    const ReturnCurve curve = return_probability(c);
    CHECK(curve.fractions[0] == doctest::Approx(1.0 / 3));
    CHECK(curve.fractions[1] == doctest::Approx(1.0 / 3));
    CHECK(curve.fractions[2] == doctest::Approx(1.0 / 3));
}

TEST_CASE("zero delays are counted but kept out of the density") {
    const Corpus c = corpus_of(pair_events(1, {0, 0, 300}), {0, 100000});
    const ReturnCurve curve = return_probability(c);
    CHECK(curve.total_returns == 2);
    CHECK(curve.zero_delays == 1);
    CHECK(curve.histogram.zero_count() == 1);
    CHECK(curve.histogram.total_in_support() == 1);
    CHECK(curve.fractions[0] == doctest::Approx(1.0));  // 0 and 300 both land short
}

TEST_CASE("return curve rejects bad breakpoints and empty results") {
    const Corpus c = corpus_of(pair_events(1, {0, 100, 200}), {0, 1000});
    CHECK_THROWS_AS(return_probability(c, nullptr, {}), ParamError);
    CHECK_THROWS_AS(return_probability(c, nullptr, {200, 100}), ParamError);
    CHECK_THROWS_AS(return_probability(c, nullptr, {100, 100}), ParamError);
    CHECK_THROWS_AS(return_probability(c, nullptr, {0, 100}), ParamError);
    CHECK_THROWS_AS(return_probability(c, nullptr, {100, 5000}), ParamError);  // beyond window

    const Corpus singles = corpus_of(pair_events(1, {5}), {0, 1000});
    CHECK_THROWS_AS(return_probability(singles, nullptr, {100}), EmptyResultError);

    CohortFilter none{CohortKind::UserActivity, 1, {}};
    CHECK_THROWS_AS(return_probability(c, &none, {100}), EmptyResultError);
}

TEST_CASE("circadian peaks flag a daily comb and stay near one on smooth data") {
    SplitRng rng(17);
    std::vector<Seconds> delays;
    for (int i = 0; i < 30000; ++i)
        delays.push_back(static_cast<Seconds>(
            std::llround(pareto_icdf(1.0, 1000.0, 500000.0, rng.uniform01()))));

    const ReturnCurve smooth{log_binned_histogram<Seconds>(delays, {}), {}, {}, 0, 0};
    const auto flat = circadian_peaks(smooth, 86400, 2);
    REQUIRE(flat.size() == 2);
    for (const auto& p : flat) CHECK(std::fabs(p.strength - 1.0) < 0.2);

    for (int i = 0; i < 20000; ++i) delays.push_back(86400);
    for (int i = 0; i < 10000; ++i) delays.push_back(172800);
    const ReturnCurve comb{log_binned_histogram<Seconds>(delays, {}), {}, {}, 0, 0};
    const auto peaks = circadian_peaks(comb, 86400, 2);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].harmonic == 1);
    CHECK(peaks[0].strength > 2.0);
    CHECK(peaks[1].harmonic == 2);
    CHECK(peaks[1].strength > 2.0);
}

TEST_CASE("circadian peaks demand coverage around each harmonic") {
    const std::vector<Seconds> short_tail{86400, 90000, 100000, 120000};
    const ReturnCurve narrow{log_binned_histogram<Seconds>(short_tail, {}), {}, {}, 0, 0};
    // first harmonic sits in the leftmost bin: no left flank
    CHECK_THROWS_AS(circadian_peaks(narrow, 86400, 1), CoverageError);
    // support ends long before the second harmonic
    CHECK_THROWS_AS(circadian_peaks(narrow, 86400, 2), CoverageError);
    CHECK_THROWS_AS(circadian_peaks(narrow, 0, 1), ParamError);
    CHECK_THROWS_AS(circadian_peaks(narrow, 86400, 0), ParamError);
}
