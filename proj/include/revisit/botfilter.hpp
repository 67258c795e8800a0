#pragma once

#include <optional>
#include <vector>

#include "revisit/corpus.hpp"
#include "revisit/stats.hpp"
#include "revisit/types.hpp"

namespace revisit {

struct BotThresholds {
    double cv_max = 0.1;             // at most this interval CV to call a timeline periodic
    std::uint64_t omega_burst = 1000;  // at least this many visits to call a burst
    double span_max = 0.01;          // burst span as a fraction of the window
    std::uint64_t n_min = 10;        // visits required before periodicity is judged

    void validate() const;
};

enum class BotLabel { Human, PeriodicAutomaton, BurstAttack, Unclassified };

/// Per-pair verdict; scores are populated whenever omega_v >= 2.
struct BotVerdict {
    PairKey key{};
    BotLabel label = BotLabel::Unclassified;
    std::optional<double> cv;             // +inf when all intervals are zero-length
    std::optional<double> span_fraction;
    std::uint64_t omega_visits{};
};

/// stddev(intervals) / mean(intervals) (population stddev). Defined for
/// omega_v >= 2; +inf when span == 0 (ties only -- never periodic).
std::optional<double> interval_cv(const PairTimeline& tl);

/// interval_cv gated on the n_min visits floor; nullopt below it.
std::optional<double> periodicity_score(const PairTimeline& tl, std::uint64_t n_min = 10);

/// span / window; nullopt when omega_v < 2.
std::optional<double> burst_score(const PairTimeline& tl, Seconds window);

/// Total function. Precedence: PeriodicAutomaton (omega_v >= n_min and
/// cv <= cv_max), then BurstAttack (omega_v >= omega_burst and
/// span_fraction <= span_max), then Human (omega_v >= 2), else Unclassified.
BotVerdict classify(const PairTimeline& tl, Seconds window, const BotThresholds& thresholds = {});

/// Verdicts for every pair, sorted by (user, url) for reproducible output.
std::vector<BotVerdict> classify_corpus(const Corpus& corpus, const BotThresholds& thresholds = {});

/// Keys labeled anything other than Human -- the mask fed back into stats.
PairKeySet non_human_keys(const std::vector<BotVerdict>& verdicts);

/// Stationarity trend: pairs bucketed by omega_v in log bins; per-bin median
/// of <tau> * omega_v, which plateaus near the window length for visitors
/// that span the observation period and collapses for burst traffic.
/// Empty bins are omitted.
struct TauOmegaBin {
    double omega_lo{};
    double omega_hi{};
    std::uint64_t pairs{};
    double median_product{};  // seconds
};

struct TauOmegaCurve {
    double base{};
    std::vector<TauOmegaBin> bins;
};

TauOmegaCurve tau_omega_curve(const Corpus& corpus, double base = 2.0);

/// Convenience per-user rollup of verdict counts; a user flagged on one
/// pair is not globally excluded.
struct UserBotSummary {
    UserId user{};
    std::uint64_t pairs{};
    std::uint64_t human{};
    std::uint64_t periodic{};
    std::uint64_t burst{};
    std::uint64_t unclassified{};
};

std::vector<UserBotSummary> user_rollup(const std::vector<BotVerdict>& verdicts);

}  // namespace revisit
