#include "revisit/botfilter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "revisit/histogram.hpp"

namespace revisit {

void BotThresholds::validate() const {
    if (cv_max < 0.0 || span_max < 0.0 || span_max > 1.0)
        throw ParamError("bot thresholds: cv_max >= 0 and span_max in [0,1] required");
    if (omega_burst < 2 || n_min < 2)
        throw ParamError("bot thresholds: omega_burst and n_min must be at least 2");
}

std::optional<double> interval_cv(const PairTimeline& tl) {
    const auto n = tl.times.size();
    if (n < 2) return std::nullopt;
    const double count = static_cast<double>(n - 1);
    const double mean = static_cast<double>(tl.span()) / count;
    if (mean == 0.0) return std::numeric_limits<double>::infinity();
    double ss = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = static_cast<double>(tl.times[i] - tl.times[i - 1]) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / count) / mean;
}

std::optional<double> periodicity_score(const PairTimeline& tl, std::uint64_t n_min) {
    if (tl.visit_count() < n_min) return std::nullopt;
    return interval_cv(tl);
}

std::optional<double> burst_score(const PairTimeline& tl, Seconds window) {
    if (window <= 0) throw ParamError("burst score: window must be positive");
    if (tl.visit_count() < 2) return std::nullopt;
    return static_cast<double>(tl.span()) / static_cast<double>(window);
}

BotVerdict classify(const PairTimeline& tl, Seconds window, const BotThresholds& thresholds) {
    thresholds.validate();
    BotVerdict v;
    v.key = tl.key;
    v.omega_visits = tl.visit_count();
    v.cv = interval_cv(tl);
    v.span_fraction = window > 0 ? burst_score(tl, window) : std::nullopt;

    if (v.omega_visits >= thresholds.n_min && v.cv && *v.cv <= thresholds.cv_max)
        v.label = BotLabel::PeriodicAutomaton;
    else if (v.omega_visits >= thresholds.omega_burst && v.span_fraction &&
             *v.span_fraction <= thresholds.span_max)
        v.label = BotLabel::BurstAttack;
    else if (v.omega_visits >= 2)
        v.label = BotLabel::Human;
    else
        v.label = BotLabel::Unclassified;
    return v;
}

std::vector<BotVerdict> classify_corpus(const Corpus& corpus, const BotThresholds& thresholds) {
    thresholds.validate();
    std::vector<BotVerdict> verdicts;
    verdicts.reserve(corpus.timelines.size());
    const Seconds window = corpus.window.length();
    for (const auto& [key, tl] : corpus.timelines) verdicts.push_back(classify(tl, window, thresholds));
    std::sort(verdicts.begin(), verdicts.end(),
              [](const BotVerdict& a, const BotVerdict& b) { return a.key < b.key; });
    return verdicts;
}

PairKeySet non_human_keys(const std::vector<BotVerdict>& verdicts) {
    PairKeySet keys;
    for (const auto& v : verdicts)
        if (v.label == BotLabel::PeriodicAutomaton || v.label == BotLabel::BurstAttack)
            keys.insert(v.key);
    return keys;
}

namespace {

double median_of(std::vector<double>& xs) {
    const auto n = xs.size();
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    if (n % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(xs.begin(), mid);
    return 0.5 * (lo + hi);
}

}  // namespace

TauOmegaCurve tau_omega_curve(const Corpus& corpus, double base) {
    if (!(base > 1.0)) throw ParamError("tau-omega curve: base must be > 1");

    std::vector<std::pair<double, double>> points;  // (omega_v, <tau> * omega_v)
    double omega_max = 0.0;
    for (const auto& [key, tl] : corpus.timelines) {
        const auto wv = tl.visit_count();
        if (wv < 2) continue;
        const double omega = static_cast<double>(wv);
        const double product =
            static_cast<double>(tl.span()) * omega / static_cast<double>(tl.return_count());
        points.emplace_back(omega, product);
        omega_max = std::max(omega_max, omega);
    }
    if (points.empty()) throw EmptyResultError("tau-omega curve: no pairs with repeat visits");

    const LogHistogram grid(base, 2.0, omega_max * (1.0 + 1e-9));
    std::vector<std::vector<double>> per_bin(grid.bin_count());
    for (const auto& [omega, product] : points) {
        const auto idx = grid.bin_index(omega);
        per_bin[idx.value()].push_back(product);
    }

    TauOmegaCurve curve;
    curve.base = base;
    for (std::size_t i = 0; i < per_bin.size(); ++i) {
        if (per_bin[i].empty()) continue;
        curve.bins.push_back({grid.lower_edge(i), grid.upper_edge(i), per_bin[i].size(),
                              median_of(per_bin[i])});
    }
    return curve;
}

std::vector<UserBotSummary> user_rollup(const std::vector<BotVerdict>& verdicts) {
    std::map<UserId, UserBotSummary> by_user;
    for (const auto& v : verdicts) {
        auto& s = by_user[v.key.user];
        s.user = v.key.user;
        ++s.pairs;
        switch (v.label) {
            case BotLabel::Human: ++s.human; break;
            case BotLabel::PeriodicAutomaton: ++s.periodic; break;
            case BotLabel::BurstAttack: ++s.burst; break;
            case BotLabel::Unclassified: ++s.unclassified; break;
        }
    }
    std::vector<UserBotSummary> out;
    out.reserve(by_user.size());
    for (auto& [user, s] : by_user) out.push_back(s);
    return out;
}

}  // namespace revisit
