#pragma once

#include <optional>
#include <unordered_set>
#include <vector>

#include "revisit/corpus.hpp"
#include "revisit/histogram.hpp"
#include "revisit/types.hpp"

namespace revisit {

using PairKeySet = std::unordered_set<PairKey, PairKeyHash>;

enum class CohortKind { UserActivity, UrlPopularity };

/// Restriction of pooled statistics by per-user total requests (inclusive
/// upper bound) or per-url total visits (inclusive lower bound). Unset
/// thresholds do not constrain.
struct CohortFilter {
    CohortKind kind = CohortKind::UserActivity;
    std::optional<std::uint64_t> max_total;
    std::optional<std::uint64_t> min_total;

    void validate() const;
    bool admits(const Corpus& corpus, const PairKey& key) const;
};

enum class OmegaKind { Visits, Returns };

/// P(omega): log-binned histogram of per-pair visit (or return) counts.
/// With Returns, single-visit pairs land in the histogram's zero tally --
/// they are the single-time events, excluded from the recurrent curve.
LogHistogram visits_histogram(const Corpus& corpus, OmegaKind which, HistogramSpec spec = {});

/// (# pairs visited exactly once) / total requests; nullopt on an empty corpus.
std::optional<double> single_visit_fraction(const Corpus& corpus);

/// All consecutive inter-visit intervals pooled over pairs passing the
/// cohort filter and absent from the mask. Zero intervals are included
/// (downstream consumers route or drop them explicitly).
std::vector<Seconds> pooled_intervals(const Corpus& corpus, const CohortFilter* filter = nullptr,
                                      const PairKeySet* mask = nullptr);

/// P(tau): log-binned density of pooled inter-visit times; zero intervals
/// (at-resolution ties) are reported in the zero tally, not the density.
LogHistogram intervisit_distribution(const Corpus& corpus, const CohortFilter* filter = nullptr,
                                     const PairKeySet* bot_mask = nullptr, HistogramSpec spec = {});

/// R(tau): density of delays between a pair's first visit and each later
/// one, plus the share of delays in each breakpoint-delimited regime.
struct ReturnCurve {
    LogHistogram histogram;
    std::vector<Seconds> breakpoints;   // sorted, strictly increasing
    std::vector<double> fractions;      // breakpoints.size() + 1 regimes, sums to 1
    std::uint64_t total_returns{};      // all pooled delays, zeros included
    std::uint64_t zero_delays{};        // returns at the same second as the first visit
};

inline constexpr Seconds kDefaultBreakpoints[] = {600, 57600};  // 10 min, 16 h

ReturnCurve return_probability(const Corpus& corpus, const CohortFilter* filter = nullptr,
                               std::vector<Seconds> breakpoints = {std::begin(kDefaultBreakpoints),
                                                                   std::end(kDefaultBreakpoints)},
                               HistogramSpec spec = {});

/// Peak strength of R(tau) near k * period for k = 1..n_harmonics: density at
/// the bin holding k*period over the geometric mean of its flanking bins.
struct CircadianPeak {
    int harmonic{};
    double strength{};
};

std::vector<CircadianPeak> circadian_peaks(const ReturnCurve& curve, Seconds period, int n_harmonics);

}  // namespace revisit
