#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "revisit/types.hpp"

namespace revisit {

// ---- interval samplers ----------------------------------------------------

/// Inverse CDF of the truncated power law f(x) ~ x^(-alpha) on [x_min, x_max].
/// alpha == 1 is exact: x = x_min * (x_max/x_min)^u.
double pareto_icdf(double alpha, double x_min, double x_max, double u);

std::vector<double> pareto_intervals(double alpha, double x_min, double x_max, std::size_t n,
                                     std::uint64_t seed);

std::vector<double> poisson_intervals(double rate, std::size_t n, std::uint64_t seed);

// ---- priority-queue (task list) model --------------------------------------

struct QueueModelParams {
    std::uint64_t queue_length = 2;  // L
    double p = 1.0;                  // probability of executing the top-priority task
    std::uint64_t steps = 0;
    Seconds tick = 1;                // seconds per model step
    bool record_all = true;          // false: follow a single tagged task instead

    void validate() const;

    friend bool operator==(const QueueModelParams&, const QueueModelParams&) = default;
};

/// Waiting times (in steps, each >= 1) of executed tasks. The task list holds
/// queue_length uniform(0,1) priorities; each step executes the top task with
/// probability p, otherwise a uniformly random one, and refills the slot.
std::vector<std::uint64_t> queue_model_waiting_times(const QueueModelParams& params,
                                                     std::uint64_t seed);

// ---- scripted automata ------------------------------------------------------

/// t_k = t0 + k*T + U(-jitter, jitter) rounded to seconds, sorted.
std::vector<Seconds> periodic_bot(Seconds period, Seconds jitter, std::uint64_t n, Seconds t0,
                                  std::uint64_t seed);

/// n_bursts runs of burst_size requests spaced intra_gap seconds; each run
/// starts uniformly inside the window (shifted so the run fits), sorted.
std::vector<Seconds> burst_attacker(std::uint64_t n_bursts, std::uint64_t burst_size,
                                    Seconds intra_gap, Window window, std::uint64_t seed);

// ---- population assembly ----------------------------------------------------

struct ParetoParams {
    double alpha = 1.0;
    double x_min = 1.0;
    double x_max = 1e5;

    friend bool operator==(const ParetoParams&, const ParetoParams&) = default;
};

struct PoissonParams {
    double rate = 1.0 / 3600.0;

    friend bool operator==(const PoissonParams&, const PoissonParams&) = default;
};

struct PeriodicParams {
    Seconds period = 3600;
    Seconds jitter = 0;
    std::uint64_t n = 0;

    friend bool operator==(const PeriodicParams&, const PeriodicParams&) = default;
};

struct BurstParams {
    std::uint64_t n_bursts = 1;
    std::uint64_t burst_size = 0;
    Seconds intra_gap = 0;

    friend bool operator==(const BurstParams&, const BurstParams&) = default;
};

using SourceParams =
    std::variant<ParetoParams, PoissonParams, QueueModelParams, PeriodicParams, BurstParams>;

enum class SourceKind { Pareto, Poisson, QueueModel, Periodic, Burst };

SourceKind source_kind(const SourceParams& params);

/// A block of identically-parametrized synthetic users; each user visits one
/// URL (url id == user id), which keeps ground truth per pair unambiguous.
struct GroupSpec {
    std::string name;
    std::uint64_t count = 0;  // users
    SourceParams params{};
    // events per user for interval-driven sources (pareto/poisson/queue);
    // drawn uniformly in [visits_min, visits_max]
    std::uint64_t visits_min = 2;
    std::uint64_t visits_max = 2;
    Seconds t0_max = 0;  // start offset drawn uniformly in [0, t0_max]
    std::optional<std::uint64_t> seed;  // overrides the derived group seed

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct PopulationSpec {
    Window window{};
    std::uint64_t master_seed = 1;
    std::vector<GroupSpec> groups;

    void validate() const;

    friend bool operator==(const PopulationSpec&, const PopulationSpec&) = default;
};

struct PairTruth {
    PairKey key{};
    SourceKind kind{};
    std::string group;
    std::vector<Seconds> times;  // exactly the emitted events, sorted

    friend bool operator==(const PairTruth&, const PairTruth&) = default;
};

struct GroundTruth {
    Window window{};
    std::uint64_t master_seed{};
    std::vector<PairTruth> pairs;  // sorted by key

    std::uint64_t event_count() const;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Population {
    std::vector<VisitEvent> events;  // sorted by (t, user, url)
    GroundTruth truth;
};

/// Deterministic under the spec's seeds: same spec, same bytes downstream.
/// Events outside the window are dropped from both stream and ground truth.
Population generate_population(const PopulationSpec& spec);

}  // namespace revisit
