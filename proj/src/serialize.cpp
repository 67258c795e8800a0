#include "revisit/serialize.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace revisit {

namespace {

// shortest round-trip decimal form, locale-independent
std::string fmt(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

// JSON cannot carry inf/nan; tolerate them as null
Json num_or_null(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

}  // namespace

std::string_view to_string(BotLabel label) {
    switch (label) {
        case BotLabel::Human: return "human";
        case BotLabel::PeriodicAutomaton: return "periodic_automaton";
        case BotLabel::BurstAttack: return "burst_attack";
        case BotLabel::Unclassified: return "unclassified";
    }
    return "unclassified";
}

std::string_view to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::Pareto: return "pareto";
        case SourceKind::Poisson: return "poisson";
        case SourceKind::QueueModel: return "queue_model";
        case SourceKind::Periodic: return "periodic";
        case SourceKind::Burst: return "burst";
    }
    return "pareto";
}

std::string_view to_string(TailModel model) {
    return model == TailModel::PowerLaw ? "power_law" : "exponential";
}

SourceKind source_kind_from_string(std::string_view name) {
    if (name == "pareto") return SourceKind::Pareto;
    if (name == "poisson") return SourceKind::Poisson;
    if (name == "queue_model") return SourceKind::QueueModel;
    if (name == "periodic") return SourceKind::Periodic;
    if (name == "burst") return SourceKind::Burst;
    throw ParamError("unknown source kind: " + std::string(name));
}

Json histogram_json(const LogHistogram& h) {
    Json bins = Json::array();
    for (std::size_t i = 0; i < h.bin_count(); ++i) {
        bins.push_back({{"lower", h.lower_edge(i)},
                        {"upper", h.upper_edge(i)},
                        {"count", h.count(i)},
                        {"density", h.density(i)}});
    }
    return {{"base", h.base()},
            {"x_min", h.x_min()},
            {"x_max", h.x_max()},
            {"total_in_support", h.total_in_support()},
            {"zero_count", h.zero_count()},
            {"below_count", h.below_count()},
            {"above_count", h.above_count()},
            {"bins", std::move(bins)}};
}

Json fit_json(const PowerLawFit& fit) {
    return {{"alpha", fit.alpha},
            {"x_min", fit.x_min},
            {"x_max", fit.x_max},
            {"n_samples", fit.n_samples},
            {"decades", fit.decades()},
            {"log_likelihood", fit.log_likelihood},
            {"ls_slope", num_or_null(fit.ls_slope)},
            {"exp_rate", fit.exp_rate},
            {"exp_log_likelihood", fit.exp_log_likelihood},
            {"log_likelihood_ratio", fit.log_likelihood_ratio()},
            {"preferred_model", to_string(fit.preferred())},
            {"valid", fit.preferred() == TailModel::PowerLaw}};
}

Json return_curve_json(const ReturnCurve& curve) {
    return {{"histogram", histogram_json(curve.histogram)},
            {"breakpoints", curve.breakpoints},
            {"fractions", curve.fractions},
            {"total_returns", curve.total_returns},
            {"zero_delays", curve.zero_delays}};
}

Json ingest_report_json(const IngestReport& report) {
    return {{"lines_read", report.lines_read},
            {"events_emitted", report.events_emitted},
            {"malformed_count", report.malformed_count},
            {"out_of_window_count", report.out_of_window_count}};
}

Json totals_json(const CorpusTotals& totals) {
    return {{"requests", totals.requests},
            {"pairs", totals.pairs},
            {"distinct_users", totals.distinct_users},
            {"distinct_urls", totals.distinct_urls},
            {"out_of_window", totals.out_of_window}};
}

void write_histogram_tsv(std::ostream& out, const LogHistogram& h) {
    for (std::size_t i = 0; i < h.bin_count(); ++i)
        out << fmt(h.lower_edge(i)) << '\t' << fmt(h.upper_edge(i)) << '\t' << fmt(h.density(i))
            << '\n';
}

void write_tau_omega_tsv(std::ostream& out, const TauOmegaCurve& curve) {
    for (const auto& bin : curve.bins)
        out << fmt(bin.omega_lo) << '\t' << fmt(bin.omega_hi) << '\t' << bin.pairs << '\t'
            << fmt(bin.median_product) << '\n';
}

void write_verdicts_tsv(std::ostream& out, const std::vector<BotVerdict>& verdicts) {
    for (const auto& v : verdicts) {
        out << v.key.user << '\t' << v.key.url << '\t' << to_string(v.label) << '\t';
        out << (v.cv ? fmt(*v.cv) : "-") << '\t';
        out << (v.span_fraction ? fmt(*v.span_fraction) : "-") << '\t';
        out << v.omega_visits << '\n';
    }
}

void write_events_tsv(std::ostream& out, std::span<const VisitEvent> events) {
    for (const auto& e : events) out << e.t << '\t' << e.user << '\t' << e.url << '\n';
}

namespace {

Json params_json(const SourceParams& params) {
    switch (source_kind(params)) {
        case SourceKind::Pareto: {
            const auto& p = std::get<ParetoParams>(params);
            return {{"alpha", p.alpha}, {"x_min", p.x_min}, {"x_max", p.x_max}};
        }
        case SourceKind::Poisson:
            return {{"rate", std::get<PoissonParams>(params).rate}};
        case SourceKind::QueueModel: {
            const auto& p = std::get<QueueModelParams>(params);
            return {{"queue_length", p.queue_length},
                    {"p", p.p},
                    {"steps", p.steps},
                    {"tick", p.tick},
                    {"record_all", p.record_all}};
        }
        case SourceKind::Periodic: {
            const auto& p = std::get<PeriodicParams>(params);
            return {{"period", p.period}, {"jitter", p.jitter}, {"n", p.n}};
        }
        case SourceKind::Burst: {
            const auto& p = std::get<BurstParams>(params);
            return {{"n_bursts", p.n_bursts},
                    {"burst_size", p.burst_size},
                    {"intra_gap", p.intra_gap}};
        }
    }
    throw ParamError("unreachable source kind");
}

SourceParams params_from_json(SourceKind kind, const Json& j) {
    switch (kind) {
        case SourceKind::Pareto: {
            ParetoParams p;
            p.alpha = j.value("alpha", p.alpha);
            p.x_min = j.value("x_min", p.x_min);
            p.x_max = j.value("x_max", p.x_max);
            return p;
        }
        case SourceKind::Poisson: {
            PoissonParams p;
            p.rate = j.value("rate", p.rate);
            return p;
        }
        case SourceKind::QueueModel: {
            QueueModelParams p;
            p.queue_length = j.value("queue_length", p.queue_length);
            p.p = j.value("p", p.p);
            p.steps = j.value("steps", p.steps);
            p.tick = j.value("tick", p.tick);
            p.record_all = j.value("record_all", p.record_all);
            return p;
        }
        case SourceKind::Periodic: {
            PeriodicParams p;
            p.period = j.value("period", p.period);
            p.jitter = j.value("jitter", p.jitter);
            p.n = j.value("n", p.n);
            return p;
        }
        case SourceKind::Burst: {
            BurstParams p;
            p.n_bursts = j.value("n_bursts", p.n_bursts);
            p.burst_size = j.value("burst_size", p.burst_size);
            p.intra_gap = j.value("intra_gap", p.intra_gap);
            return p;
        }
    }
    throw ParamError("unreachable source kind");
}

Json window_json(const Window& w) { return {{"begin", w.begin}, {"end", w.end}}; }

Window window_from_json(const Json& j) {
    Window w;
    w.begin = j.at("begin").get<Seconds>();
    w.end = j.at("end").get<Seconds>();
    return w;
}

}  // namespace

Json population_spec_json(const PopulationSpec& spec) {
    Json groups = Json::array();
    for (const auto& g : spec.groups) {
        Json jg = {{"name", g.name},
                   {"count", g.count},
                   {"kind", to_string(source_kind(g.params))},
                   {"params", params_json(g.params)},
                   {"visits_min", g.visits_min},
                   {"visits_max", g.visits_max},
                   {"t0_max", g.t0_max}};
        if (g.seed) jg["seed"] = *g.seed;
        groups.push_back(std::move(jg));
    }
    return {{"window", window_json(spec.window)},
            {"master_seed", spec.master_seed},
            {"groups", std::move(groups)}};
}

PopulationSpec population_spec_from_json(const Json& j) {
    PopulationSpec spec;
    spec.window = window_from_json(j.at("window"));
    spec.master_seed = j.value("master_seed", spec.master_seed);
    for (const auto& jg : j.value("groups", Json::array())) {
        GroupSpec g;
        g.name = jg.at("name").get<std::string>();
        g.count = jg.at("count").get<std::uint64_t>();
        const auto kind = source_kind_from_string(jg.at("kind").get<std::string>());
        g.params = params_from_json(kind, jg.value("params", Json::object()));
        g.visits_min = jg.value("visits_min", g.visits_min);
        g.visits_max = jg.value("visits_max", g.visits_max);
        g.t0_max = jg.value("t0_max", g.t0_max);
        if (jg.contains("seed")) g.seed = jg.at("seed").get<std::uint64_t>();
        spec.groups.push_back(std::move(g));
    }
    return spec;
}

Json ground_truth_json(const GroundTruth& truth) {
    Json pairs = Json::array();
    for (const auto& p : truth.pairs) {
        pairs.push_back({{"user", p.key.user},
                         {"url", p.key.url},
                         {"kind", to_string(p.kind)},
                         {"group", p.group},
                         {"times", p.times}});
    }
    return {{"window", window_json(truth.window)},
            {"master_seed", truth.master_seed},
            {"pairs", std::move(pairs)}};
}

GroundTruth ground_truth_from_json(const Json& j) {
    GroundTruth truth;
    truth.window = window_from_json(j.at("window"));
    truth.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& jp : j.value("pairs", Json::array())) {
        PairTruth p;
        p.key = {jp.at("user").get<UserId>(), jp.at("url").get<UrlId>()};
        p.kind = source_kind_from_string(jp.at("kind").get<std::string>());
        p.group = jp.at("group").get<std::string>();
        p.times = jp.at("times").get<std::vector<Seconds>>();
        truth.pairs.push_back(std::move(p));
    }
    return truth;
}

}  // namespace revisit
