#include "revisit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "revisit/rng.hpp"

namespace revisit {

double pareto_icdf(double alpha, double x_min, double x_max, double u) {
    if (!(x_min > 0.0) || !(x_min < x_max)) throw ParamError("pareto: need 0 < x_min < x_max");
    if (alpha < 0.0) throw ParamError("pareto: alpha must be nonnegative");
    if (alpha == 1.0) return x_min * std::pow(x_max / x_min, u);
    const double t = 1.0 - alpha;
    const double lo = std::pow(x_min, t), hi = std::pow(x_max, t);
    return std::pow(lo + u * (hi - lo), 1.0 / t);
}

std::vector<double> pareto_intervals(double alpha, double x_min, double x_max, std::size_t n,
                                     std::uint64_t seed) {
    pareto_icdf(alpha, x_min, x_max, 0.0);  // validate once
    SplitRng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) x = pareto_icdf(alpha, x_min, x_max, rng.uniform01());
    return out;
}

std::vector<double> poisson_intervals(double rate, std::size_t n, std::uint64_t seed) {
    if (!(rate > 0.0)) throw ParamError("poisson: rate must be positive");
    SplitRng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) x = rng.exponential(rate);
    return out;
}

void QueueModelParams::validate() const {
    if (queue_length < 1) throw ParamError("queue model: queue_length must be >= 1");
    if (p < 0.0 || p > 1.0) throw ParamError("queue model: p must be in [0, 1]");
    if (steps < 1) throw ParamError("queue model: steps must be >= 1");
    if (tick < 1) throw ParamError("queue model: tick must be >= 1");
}

std::vector<std::uint64_t> queue_model_waiting_times(const QueueModelParams& params,
                                                     std::uint64_t seed) {
    params.validate();
    SplitRng rng(seed);
    const std::size_t L = params.queue_length;

    std::vector<double> priority(L);
    std::vector<std::uint64_t> inserted_at(L, 0);  // step at which the slot was filled
    for (double& pr : priority) pr = rng.uniform01();

    std::size_t tagged = 0;  // slot followed when record_all is off
    std::vector<std::uint64_t> waits;
    if (params.record_all)
        waits.reserve(params.steps);

    for (std::uint64_t step = 1; step <= params.steps; ++step) {
        std::size_t pick;
        if (rng.uniform01() < params.p) {
            pick = static_cast<std::size_t>(
                std::max_element(priority.begin(), priority.end()) - priority.begin());
        } else {
            pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(L) - 1));
        }
        const std::uint64_t wait = step - inserted_at[pick];
        if (params.record_all) {
            waits.push_back(wait);
        } else if (pick == tagged) {
            waits.push_back(wait);
        }
        priority[pick] = rng.uniform01();
        inserted_at[pick] = step;
    }
    return waits;
}

std::vector<Seconds> periodic_bot(Seconds period, Seconds jitter, std::uint64_t n, Seconds t0,
                                  std::uint64_t seed) {
    if (period < 1) throw ParamError("periodic bot: period must be >= 1");
    if (jitter < 0 || 2 * jitter >= period) throw ParamError("periodic bot: jitter must be < period/2");
    SplitRng rng(seed);
    std::vector<Seconds> times;
    times.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        double t = static_cast<double>(t0) + static_cast<double>(k) * static_cast<double>(period);
        if (jitter > 0) t += rng.uniform(-static_cast<double>(jitter), static_cast<double>(jitter));
        times.push_back(static_cast<Seconds>(std::llround(t)));
    }
    std::sort(times.begin(), times.end());
    return times;
}

std::vector<Seconds> burst_attacker(std::uint64_t n_bursts, std::uint64_t burst_size,
                                    Seconds intra_gap, Window window, std::uint64_t seed) {
    if (n_bursts < 1 || burst_size < 1) throw ParamError("burst attacker: counts must be positive");
    if (intra_gap < 0) throw ParamError("burst attacker: intra_gap must be nonnegative");
    const Seconds duration = intra_gap * static_cast<Seconds>(burst_size - 1);
    if (duration > window.length()) throw ParamError("burst attacker: burst does not fit the window");

    SplitRng rng(seed);
    std::vector<Seconds> times;
    times.reserve(n_bursts * burst_size);
    for (std::uint64_t b = 0; b < n_bursts; ++b) {
        const Seconds start = rng.uniform_int(window.begin, window.end - duration);
        for (std::uint64_t i = 0; i < burst_size; ++i)
            times.push_back(start + intra_gap * static_cast<Seconds>(i));
    }
    std::sort(times.begin(), times.end());
    return times;
}

SourceKind source_kind(const SourceParams& params) {
    return static_cast<SourceKind>(params.index());
}

void PopulationSpec::validate() const {
    if (window.begin > window.end) throw ParamError("population: window begin exceeds end");
    for (const auto& g : groups) {
        if (g.name.empty()) throw ParamError("population: group needs a name");
        if (g.visits_min < 1 || g.visits_max < g.visits_min)
            throw ParamError("population: need 1 <= visits_min <= visits_max");
        if (g.t0_max < 0) throw ParamError("population: t0_max must be nonnegative");
        switch (source_kind(g.params)) {
            case SourceKind::Pareto: {
                const auto& p = std::get<ParetoParams>(g.params);
                pareto_icdf(p.alpha, p.x_min, p.x_max, 0.0);
                break;
            }
            case SourceKind::Poisson:
                if (!(std::get<PoissonParams>(g.params).rate > 0.0))
                    throw ParamError("population: poisson rate must be positive");
                break;
            case SourceKind::QueueModel: {
                // steps == 0 here means "derive from the visit draw later"
                auto q = std::get<QueueModelParams>(g.params);
                q.steps = std::max<std::uint64_t>(q.steps, 1);
                q.validate();
                break;
            }
            case SourceKind::Periodic: {
                const auto& p = std::get<PeriodicParams>(g.params);
                if (p.period < 1 || p.jitter < 0 || 2 * p.jitter >= p.period)
                    throw ParamError("population: bad periodic parameters");
                break;
            }
            case SourceKind::Burst: {
                const auto& p = std::get<BurstParams>(g.params);
                if (p.n_bursts < 1 || p.burst_size < 1 || p.intra_gap < 0)
                    throw ParamError("population: bad burst parameters");
                break;
            }
        }
    }
}

std::uint64_t GroundTruth::event_count() const {
    std::uint64_t n = 0;
    for (const auto& p : pairs) n += p.times.size();
    return n;
}

namespace {

// Accumulate integer timestamps from continuous intervals, starting at t0.
std::vector<Seconds> timeline_from_intervals(Seconds t0, const std::vector<double>& intervals,
                                             std::uint64_t visits) {
    std::vector<Seconds> times;
    times.reserve(visits);
    times.push_back(t0);
    double t = static_cast<double>(t0);
    for (std::size_t i = 0; i + 1 < visits; ++i) {
        t += intervals[i];
        times.push_back(static_cast<Seconds>(std::llround(t)));
    }
    return times;
}

std::vector<Seconds> clip_to_window(std::vector<Seconds> times, Window w) {
    std::erase_if(times, [&](Seconds t) { return !w.contains(t); });
    return times;
}

}  // namespace

Population generate_population(const PopulationSpec& spec) {
    spec.validate();

    Population pop;
    pop.truth.window = spec.window;
    pop.truth.master_seed = spec.master_seed;

    UserId next_user = 1;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const GroupSpec& group = spec.groups[g];
        const std::uint64_t group_seed =
            group.seed.value_or(SplitRng::derive_seed(spec.master_seed, g));
        const SourceKind kind = source_kind(group.params);

        for (std::uint64_t u = 0; u < group.count; ++u, ++next_user) {
            const std::uint64_t user_seed = SplitRng::derive_seed(group_seed, u);
            SplitRng setup = SplitRng::child(user_seed, 0);
            const std::uint64_t sample_seed = SplitRng::derive_seed(user_seed, 1);

            const Seconds t0 =
                spec.window.begin +
                (group.t0_max > 0 ? setup.uniform_int(0, group.t0_max) : 0);

            std::vector<Seconds> times;
            switch (kind) {
                case SourceKind::Pareto: {
                    const auto& p = std::get<ParetoParams>(group.params);
                    const auto visits = static_cast<std::uint64_t>(
                        setup.uniform_int(static_cast<std::int64_t>(group.visits_min),
                                          static_cast<std::int64_t>(group.visits_max)));
                    const auto iv = pareto_intervals(p.alpha, p.x_min, p.x_max,
                                                     visits > 0 ? visits - 1 : 0, sample_seed);
                    times = timeline_from_intervals(t0, iv, visits);
                    break;
                }
                case SourceKind::Poisson: {
                    const auto& p = std::get<PoissonParams>(group.params);
                    const auto visits = static_cast<std::uint64_t>(
                        setup.uniform_int(static_cast<std::int64_t>(group.visits_min),
                                          static_cast<std::int64_t>(group.visits_max)));
                    const auto iv = poisson_intervals(p.rate, visits > 0 ? visits - 1 : 0, sample_seed);
                    times = timeline_from_intervals(t0, iv, visits);
                    break;
                }
                case SourceKind::QueueModel: {
                    auto params = std::get<QueueModelParams>(group.params);
                    const auto visits = static_cast<std::uint64_t>(
                        setup.uniform_int(static_cast<std::int64_t>(group.visits_min),
                                          static_cast<std::int64_t>(group.visits_max)));
                    // enough executions to yield the requested visit count
                    params.steps = std::max<std::uint64_t>(params.steps, visits);
                    const auto waits = queue_model_waiting_times(params, sample_seed);
                    std::vector<double> iv;
                    iv.reserve(visits > 0 ? visits - 1 : 0);
                    for (std::size_t i = 0; i + 1 < visits && i < waits.size(); ++i)
                        iv.push_back(static_cast<double>(waits[i]) * static_cast<double>(params.tick));
                    times = timeline_from_intervals(t0, iv, iv.size() + 1);
                    break;
                }
                case SourceKind::Periodic: {
                    const auto& p = std::get<PeriodicParams>(group.params);
                    times = periodic_bot(p.period, p.jitter, p.n, t0, sample_seed);
                    break;
                }
                case SourceKind::Burst: {
                    const auto& p = std::get<BurstParams>(group.params);
                    times = burst_attacker(p.n_bursts, p.burst_size, p.intra_gap, spec.window,
                                           sample_seed);
                    break;
                }
            }

            times = clip_to_window(std::move(times), spec.window);
            if (times.empty()) continue;

            PairTruth truth;
            truth.key = {next_user, next_user};
            truth.kind = kind;
            truth.group = group.name;
            truth.times = times;
            for (Seconds t : times) pop.events.push_back({next_user, next_user, t});
            pop.truth.pairs.push_back(std::move(truth));
        }
    }

    std::sort(pop.events.begin(), pop.events.end(), [](const VisitEvent& a, const VisitEvent& b) {
        return std::tie(a.t, a.user, a.url) < std::tie(b.t, b.user, b.url);
    });
    std::sort(pop.truth.pairs.begin(), pop.truth.pairs.end(),
              [](const PairTruth& a, const PairTruth& b) { return a.key < b.key; });
    return pop;
}

}  // namespace revisit
