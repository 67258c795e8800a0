#include "revisit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace revisit {

void CohortFilter::validate() const {
    if ((max_total && *max_total == 0) || (min_total && *min_total == 0))
        throw ParamError("cohort filter: thresholds must be positive");
}

bool CohortFilter::admits(const Corpus& corpus, const PairKey& key) const {
    std::uint64_t total = 0;
    if (kind == CohortKind::UserActivity) {
        auto it = corpus.user_requests.find(key.user);
        total = it == corpus.user_requests.end() ? 0 : it->second;
    } else {
        auto it = corpus.url_visits.find(key.url);
        total = it == corpus.url_visits.end() ? 0 : it->second;
    }
    if (max_total && total > *max_total) return false;
    if (min_total && total < *min_total) return false;
    return true;
}

LogHistogram visits_histogram(const Corpus& corpus, OmegaKind which, HistogramSpec spec) {
    std::vector<std::uint64_t> omegas;
    omegas.reserve(corpus.timelines.size());
    for (const auto& [key, tl] : corpus.timelines)
        omegas.push_back(which == OmegaKind::Visits ? tl.visit_count() : tl.return_count());
    if (omegas.empty()) throw EmptyResultError("visits histogram: empty corpus");
    return log_binned_histogram<std::uint64_t>(omegas, spec);
}

std::optional<double> single_visit_fraction(const Corpus& corpus) {
    if (corpus.totals.requests == 0) return std::nullopt;
    std::uint64_t singles = 0;
    for (const auto& [key, tl] : corpus.timelines)
        if (tl.visit_count() == 1) ++singles;
    return static_cast<double>(singles) / static_cast<double>(corpus.totals.requests);
}

std::vector<Seconds> pooled_intervals(const Corpus& corpus, const CohortFilter* filter,
                                      const PairKeySet* mask) {
    if (filter) filter->validate();
    std::vector<Seconds> pooled;
    for (const auto& [key, tl] : corpus.timelines) {
        if (tl.times.size() < 2) continue;
        if (mask && mask->contains(key)) continue;
        if (filter && !filter->admits(corpus, key)) continue;
        for (std::size_t i = 1; i < tl.times.size(); ++i)
            pooled.push_back(tl.times[i] - tl.times[i - 1]);
    }
    return pooled;
}

LogHistogram intervisit_distribution(const Corpus& corpus, const CohortFilter* filter,
                                     const PairKeySet* bot_mask, HistogramSpec spec) {
    const auto pooled = pooled_intervals(corpus, filter, bot_mask);
    if (pooled.empty()) throw EmptyResultError("intervisit distribution: no intervals after filtering");
    return log_binned_histogram<Seconds>(pooled, spec);
}

ReturnCurve return_probability(const Corpus& corpus, const CohortFilter* filter,
                               std::vector<Seconds> breakpoints, HistogramSpec spec) {
    if (filter) filter->validate();
    if (breakpoints.empty()) throw ParamError("return probability: need at least one breakpoint");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
        std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end())
        throw ParamError("return probability: breakpoints must be strictly increasing");
    for (Seconds bp : breakpoints)
        if (bp <= 0 || bp > corpus.window.length())
            throw ParamError("return probability: breakpoints must lie inside the window");

    std::vector<Seconds> delays;
    for (const auto& [key, tl] : corpus.timelines) {
        if (tl.times.size() < 2) continue;
        if (filter && !filter->admits(corpus, key)) continue;
        const Seconds first = tl.times.front();
        for (std::size_t i = 1; i < tl.times.size(); ++i) delays.push_back(tl.times[i] - first);
    }
    if (delays.empty()) throw EmptyResultError("return probability: no returns");

    std::vector<std::uint64_t> regime_counts(breakpoints.size() + 1, 0);
    std::uint64_t zeros = 0;
    for (Seconds d : delays) {
        if (d == 0) ++zeros;
        const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), d);
        ++regime_counts[static_cast<std::size_t>(it - breakpoints.begin())];
    }

    ReturnCurve curve{log_binned_histogram<Seconds>(delays, spec), std::move(breakpoints), {},
                      delays.size(), zeros};
    curve.fractions.reserve(regime_counts.size());
    for (std::uint64_t c : regime_counts)
        curve.fractions.push_back(static_cast<double>(c) / static_cast<double>(delays.size()));
    return curve;
}

std::vector<CircadianPeak> circadian_peaks(const ReturnCurve& curve, Seconds period, int n_harmonics) {
    if (period <= 0 || n_harmonics < 1) throw ParamError("circadian peaks: bad period or harmonic count");
    const LogHistogram& h = curve.histogram;
    const double needed = static_cast<double>(period) * n_harmonics;
    if (h.x_max() < needed) throw CoverageError("circadian peaks: histogram does not cover requested harmonics");

    std::vector<CircadianPeak> peaks;
    peaks.reserve(static_cast<std::size_t>(n_harmonics));
    for (int k = 1; k <= n_harmonics; ++k) {
        const auto idx = h.bin_index(static_cast<double>(period) * k);
        if (!idx || *idx == 0 || *idx + 1 >= h.bin_count())
            throw CoverageError("circadian peaks: harmonic bin lacks flanking bins");
        const double gm = std::sqrt(h.density(*idx - 1) * h.density(*idx + 1));
        double strength;
        if (gm > 0.0)
            strength = h.density(*idx) / gm;
        else
            // empty flanks: an occupied bin is an unambiguous peak, an empty one is flat
            strength = h.density(*idx) > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
        peaks.push_back({k, strength});
    }
    return peaks;
}

}  // namespace revisit
