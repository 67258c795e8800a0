#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "revisit/botfilter.hpp"
#include "revisit/corpus.hpp"
#include "revisit/ingest.hpp"
#include "revisit/parallel.hpp"
#include "revisit/powerlaw.hpp"
#include "revisit/serialize.hpp"
#include "revisit/stats.hpp"
#include "revisit/synthgen.hpp"

namespace fs = std::filesystem;
using namespace revisit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitParseRate = 2;
constexpr int kExitEmpty = 3;

// ---- small IO helpers -------------------------------------------------------

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        writer(out);
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const Json& j) {
    atomic_write(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

Json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    return Json::parse(in);
}

// ---- shared option bundles --------------------------------------------------

struct InputArgs {
    std::string input;
    LogFormat format = LogFormat::Tsv;
    UrlMode url_mode = UrlMode::PathOnly;
    std::string salt_file;  // salt comes from here or $REVISIT_SALT, never a flag
    Seconds window_begin = 0;
    Seconds window_end = std::numeric_limits<Seconds>::max();
    double max_malformed_rate = 0.01;

    Window window() const { return {window_begin, window_end}; }
};

struct BotArgs {
    BotThresholds thresholds{};
};

void add_input_options(CLI::App* cmd, InputArgs& args) {
    cmd->add_option("-i,--input", args.input, "Input log file")->required();
    cmd->add_option("--format", args.format, "Input format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, LogFormat>{{"tsv", LogFormat::Tsv},
                                             {"combined", LogFormat::Combined}},
            CLI::ignore_case));
    cmd->add_option("--url-mode", args.url_mode, "URL canonicalization for combined logs")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, UrlMode>{{"path_only", UrlMode::PathOnly},
                                           {"full", UrlMode::Full}},
            CLI::ignore_case));
    cmd->add_option("--salt-file", args.salt_file,
                    "File holding the anonymization salt (default: $REVISIT_SALT)");
    cmd->add_option("--window-begin", args.window_begin, "Observation window start (epoch s)");
    cmd->add_option("--window-end", args.window_end, "Observation window end (epoch s, inclusive)");
    cmd->add_option("--max-malformed-rate", args.max_malformed_rate,
                    "Abort (exit 2) when malformed lines exceed this fraction");
}

void add_bot_options(CLI::App* cmd, BotArgs& args) {
    cmd->add_option("--cv-max", args.thresholds.cv_max,
                    "Interval CV at or below which a pair is periodic");
    cmd->add_option("--omega-burst", args.thresholds.omega_burst,
                    "Visits at or above which a concentrated pair is a burst");
    cmd->add_option("--span-max", args.thresholds.span_max,
                    "Span fraction at or below which a heavy pair is a burst");
    cmd->add_option("--n-min", args.thresholds.n_min, "Visits required to judge periodicity");
}

Json input_config_json(const InputArgs& args) {
    return {{"input", args.input},
            {"format", args.format == LogFormat::Tsv ? "tsv" : "combined"},
            {"url_mode", args.url_mode == UrlMode::PathOnly ? "path_only" : "full"},
            {"window", {{"begin", args.window_begin}, {"end", args.window_end}}},
            {"max_malformed_rate", args.max_malformed_rate},
            {"salt_file", args.salt_file.empty() ? Json(nullptr) : Json(args.salt_file)}};
}

Json bot_config_json(const BotThresholds& t) {
    return {{"cv_max", t.cv_max},
            {"omega_burst", t.omega_burst},
            {"span_max", t.span_max},
            {"n_min", t.n_min}};
}

std::optional<AnonymizationKey> maybe_key(const InputArgs& args) {
    if (args.format != LogFormat::Combined) return std::nullopt;
    if (!args.salt_file.empty()) return AnonymizationKey::from_file(args.salt_file);
    return AnonymizationKey::from_env();
}

IngestReport load_events(const InputArgs& args, std::vector<VisitEvent>& events) {
    std::ifstream in(args.input, std::ios::binary);
    if (!in) throw IoError("cannot open input: " + args.input);
    const auto key = maybe_key(args);
    return stream_ingest(
        in, args.format, key ? &*key : nullptr, args.window(),
        [&](const VisitEvent& e) { events.push_back(e); }, args.url_mode);
}

bool malformed_rate_exceeded(const IngestReport& report, double limit) {
    if (report.lines_read == 0) return false;
    return static_cast<double>(report.malformed_count) / static_cast<double>(report.lines_read) >
           limit;
}

// ---- generate ----------------------------------------------------------------

struct GenerateArgs {
    std::string spec_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& args) {
    PopulationSpec spec = population_spec_from_json(read_json(args.spec_path));
    if (args.seed) spec.master_seed = *args.seed;

    const Population pop = generate_population(spec);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    atomic_write(dir / "events.tsv",
                 [&](std::ostream& out) { write_events_tsv(out, pop.events); });
    write_json(dir / "ground_truth.json", ground_truth_json(pop.truth));
    write_json(dir / "run_config.json",
               {{"command", "generate"},
                {"spec", population_spec_json(spec)},
                {"out_dir", args.out_dir}});

    std::cout << "generate: " << pop.events.size() << " events, " << pop.truth.pairs.size()
              << " pairs -> " << args.out_dir << "\n";
    return pop.events.empty() ? kExitEmpty : kExitOk;
}

// ---- ingest -------------------------------------------------------------------

struct IngestCmdArgs {
    InputArgs in;
    std::string out_dir;
};

int cmd_ingest(const IngestCmdArgs& args) {
    std::vector<VisitEvent> events;
    const IngestReport report = load_events(args.in, events);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    atomic_write(dir / "events.tsv", [&](std::ostream& out) { write_events_tsv(out, events); });
    write_json(dir / "ingest_report.json", ingest_report_json(report));
    write_json(dir / "run_config.json",
               {{"command", "ingest"}, {"input", input_config_json(args.in)},
                {"out_dir", args.out_dir}});

    std::cout << "ingest: " << report.events_emitted << "/" << report.lines_read
              << " lines -> events, " << report.malformed_count << " malformed, "
              << report.out_of_window_count << " outside window\n";
    if (malformed_rate_exceeded(report, args.in.max_malformed_rate)) return kExitParseRate;
    return events.empty() ? kExitEmpty : kExitOk;
}

// ---- botscan ------------------------------------------------------------------

struct BotscanArgs {
    InputArgs in;
    BotArgs bot;
    std::string out_dir;
};

Json verdict_summary_json(const std::vector<BotVerdict>& verdicts) {
    std::uint64_t human = 0, periodic = 0, burst = 0, unclassified = 0;
    for (const auto& v : verdicts) {
        switch (v.label) {
            case BotLabel::Human: ++human; break;
            case BotLabel::PeriodicAutomaton: ++periodic; break;
            case BotLabel::BurstAttack: ++burst; break;
            case BotLabel::Unclassified: ++unclassified; break;
        }
    }
    return {{"pairs", verdicts.size()},
            {"human", human},
            {"periodic_automaton", periodic},
            {"burst_attack", burst},
            {"unclassified", unclassified},
            {"non_human", periodic + burst}};
}

int cmd_botscan(const BotscanArgs& args) {
    std::vector<VisitEvent> events;
    const IngestReport report = load_events(args.in, events);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    write_json(dir / "run_config.json",
               {{"command", "botscan"},
                {"input", input_config_json(args.in)},
                {"bot_thresholds", bot_config_json(args.bot.thresholds)},
                {"out_dir", args.out_dir}});
    write_json(dir / "ingest_report.json", ingest_report_json(report));
    if (malformed_rate_exceeded(report, args.in.max_malformed_rate)) {
        std::cout << "botscan: malformed-line rate exceeded\n";
        return kExitParseRate;
    }

    const Corpus corpus = build_corpus(events, args.in.window());
    const auto verdicts = classify_corpus(corpus, args.bot.thresholds);
    atomic_write(dir / "verdicts.tsv",
                 [&](std::ostream& out) { write_verdicts_tsv(out, verdicts); });
    const Json summary = verdict_summary_json(verdicts);
    write_json(dir / "botscan_summary.json", summary);

    std::cout << "botscan: " << verdicts.size() << " pairs, "
              << summary["non_human"].get<std::uint64_t>() << " non-human -> " << args.out_dir
              << "\n";
    return verdicts.empty() ? kExitEmpty : kExitOk;
}

// ---- analyze ------------------------------------------------------------------

struct AnalyzeArgs {
    InputArgs in;
    BotArgs bot;
    std::string out_dir;
    double base = kDefaultLogBase;
    double tau_omega_base = 2.0;
    std::vector<std::uint64_t> cohorts{10, 100, 1000};
    std::vector<Seconds> breakpoints{600, 57600};
    bool mask_bots = false;
    unsigned threads = 0;
    double fit_x_min = 0.0;
    double fit_x_max = 0.0;
};

int cmd_analyze(const AnalyzeArgs& args) {
    std::vector<VisitEvent> events;
    const IngestReport ingest_report = load_events(args.in, events);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    write_json(dir / "run_config.json",
               {{"command", "analyze"},
                {"input", input_config_json(args.in)},
                {"histogram_base", args.base},
                {"tau_omega_base", args.tau_omega_base},
                {"cohorts", args.cohorts},
                {"breakpoints", args.breakpoints},
                {"bot_thresholds", bot_config_json(args.bot.thresholds)},
                {"mask_bots", args.mask_bots},
                {"threads", args.threads},
                {"fit_x_min", args.fit_x_min},
                {"fit_x_max", args.fit_x_max},
                {"out_dir", args.out_dir}});
    write_json(dir / "ingest_report.json", ingest_report_json(ingest_report));
    if (malformed_rate_exceeded(ingest_report, args.in.max_malformed_rate)) {
        std::cout << "analyze: malformed-line rate exceeded\n";
        return kExitParseRate;
    }

    const Corpus corpus = build_corpus(events, args.in.window());
    events.clear();
    events.shrink_to_fit();

    Json report;
    report["totals"] = totals_json(corpus.totals);
    report["ingest"] = ingest_report_json(ingest_report);
    if (const auto f = single_visit_fraction(corpus)) report["single_visit_fraction"] = *f;

    if (corpus.totals.requests == 0) {
        write_json(dir / "report.json", report);
        std::cout << "analyze: empty corpus\n";
        return kExitEmpty;
    }

    bool empty_result = false;
    HistogramSpec hspec;
    hspec.base = args.base;

    // P(omega): recurrent-visit histogram, plus the all-visits variant
    {
        Json pw;
        pw["visits"] = histogram_json(visits_histogram(corpus, OmegaKind::Visits, hspec));
        try {
            const auto returns = visits_histogram(corpus, OmegaKind::Returns, hspec);
            pw["returns"] = histogram_json(returns);
            atomic_write(dir / "pw.tsv", [&](std::ostream& out) { write_histogram_tsv(out, returns); });
        } catch (const EmptyResultError&) {
            empty_result = true;
        }
        write_json(dir / "pw.json", pw);
    }

    // optional bot mask, chained from the same corpus
    PairKeySet mask;
    if (args.mask_bots) {
        const auto verdicts = classify_corpus(corpus, args.bot.thresholds);
        mask = non_human_keys(verdicts);
        atomic_write(dir / "verdicts.tsv",
                     [&](std::ostream& out) { write_verdicts_tsv(out, verdicts); });
        report["bot_mask"] = verdict_summary_json(verdicts);
    }
    const PairKeySet* mask_ptr = args.mask_bots ? &mask : nullptr;

    // P(tau) and its power-law fit
    try {
        const auto pt = intervisit_distribution(corpus, nullptr, mask_ptr, hspec);
        write_json(dir / "pt.json", histogram_json(pt));
        atomic_write(dir / "pt.tsv", [&](std::ostream& out) { write_histogram_tsv(out, pt); });
    } catch (const EmptyResultError&) {
        empty_result = true;
    }
    try {
        const auto pooled = pooled_intervals(corpus, nullptr, mask_ptr);
        FitOptions fopts;
        fopts.x_min = args.fit_x_min;
        fopts.x_max = args.fit_x_max;
        const auto fit = fit_power_law(std::span<const Seconds>(pooled), fopts);
        write_json(dir / "fit.json", fit_json(fit));
        report["fit"] = fit_json(fit);
    } catch (const DegenerateFitError& e) {
        report["fit_error"] = e.what();
    } catch (const EmptyResultError& e) {
        report["fit_error"] = e.what();
        empty_result = true;
    }

    // R(tau) with regime fractions
    try {
        const auto rt = return_probability(corpus, nullptr, args.breakpoints, hspec);
        write_json(dir / "rt.json", return_curve_json(rt));
        atomic_write(dir / "rt.tsv",
                     [&](std::ostream& out) { write_histogram_tsv(out, rt.histogram); });
        Json regimes = Json::array();
        for (std::size_t i = 0; i < rt.fractions.size(); ++i) {
            Json r = {{"fraction", rt.fractions[i]}};
            r["up_to"] = i < rt.breakpoints.size() ? Json(rt.breakpoints[i]) : Json(nullptr);
            regimes.push_back(std::move(r));
        }
        report["regimes"] = std::move(regimes);
        report["total_returns"] = rt.total_returns;
    } catch (const EmptyResultError&) {
        empty_result = true;
    }

    // tau-omega stationarity trend
    try {
        const auto curve = tau_omega_curve(corpus, args.tau_omega_base);
        atomic_write(dir / "tau_omega.tsv",
                     [&](std::ostream& out) { write_tau_omega_tsv(out, curve); });
    } catch (const EmptyResultError&) {
        empty_result = true;
    }

    // cohort robustness table: fitted exponent per activity threshold
    {
        std::vector<Json> rows(args.cohorts.size());
        for_each_shard(args.cohorts.size(), args.threads, [&](std::size_t i) {
            CohortFilter filter;
            filter.kind = CohortKind::UserActivity;
            filter.max_total = args.cohorts[i];
            Json row = {{"max_total", args.cohorts[i]}};
            try {
                const auto pooled = pooled_intervals(corpus, &filter, mask_ptr);
                FitOptions fopts;
                fopts.x_min = args.fit_x_min;
                fopts.x_max = args.fit_x_max;
                const auto fit = fit_power_law(std::span<const Seconds>(pooled), fopts);
                row["alpha"] = fit.alpha;
                row["ls_slope"] = fit.ls_slope;
                row["n_samples"] = fit.n_samples;
                row["valid"] = fit.preferred() == TailModel::PowerLaw;
            } catch (const std::exception& e) {
                row["error"] = e.what();
            }
            rows[i] = std::move(row);
        });
        report["cohort_fits"] = rows;
    }

    write_json(dir / "report.json", report);
    std::cout << "analyze: " << corpus.totals.requests << " requests, " << corpus.totals.pairs
              << " pairs -> " << args.out_dir << (empty_result ? " (some curves empty)" : "")
              << "\n";
    return empty_result ? kExitEmpty : kExitOk;
}

// ---- report -------------------------------------------------------------------

int cmd_report(const std::string& dir) {
    const Json report = read_json(fs::path(dir) / "report.json");
    std::cout << "run summary for " << dir << "\n";
    if (report.contains("totals")) {
        const auto& t = report["totals"];
        std::cout << "  requests:        " << t["requests"] << "\n"
                  << "  pairs:           " << t["pairs"] << "\n"
                  << "  distinct users:  " << t["distinct_users"] << "\n"
                  << "  distinct urls:   " << t["distinct_urls"] << "\n";
    }
    if (report.contains("single_visit_fraction"))
        std::cout << "  single-visit fraction: " << report["single_visit_fraction"] << "\n";
    if (report.contains("fit")) {
        const auto& f = report["fit"];
        std::cout << "  intervisit exponent: " << f["alpha"] << " (ls cross-check "
                  << f["ls_slope"] << ", " << f["n_samples"] << " samples, valid "
                  << f["valid"] << ")\n";
    }
    if (report.contains("regimes")) {
        std::cout << "  return regimes:";
        for (const auto& r : report["regimes"]) std::cout << " " << r["fraction"];
        std::cout << "\n";
    }
    if (report.contains("cohort_fits")) {
        std::cout << "  cohort exponents:";
        for (const auto& row : report["cohort_fits"]) {
            std::cout << " [<=" << row["max_total"] << ": ";
            if (row.contains("alpha"))
                std::cout << row["alpha"];
            else
                std::cout << "n/a";
            std::cout << "]";
        }
        std::cout << "\n";
    }
    if (report.contains("bot_mask"))
        std::cout << "  masked non-human pairs: " << report["bot_mask"]["non_human"] << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming web-access-log analytics: revisit timelines, heavy-tail fits, bot filters"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read option defaults from an INI/TOML file");

    GenerateArgs gen_args;
    auto* gen = app.add_subcommand("generate", "Emit a synthetic event log with ground truth");
    gen->add_option("--spec", gen_args.spec_path, "Population spec (JSON)")->required();
    gen->add_option("-o,--out-dir", gen_args.out_dir, "Output directory")->required();
    gen->add_option("--seed", gen_args.seed, "Override the spec's master seed");

    IngestCmdArgs ingest_args;
    auto* ing = app.add_subcommand("ingest", "Normalize a raw log to the canonical event format");
    add_input_options(ing, ingest_args.in);
    ing->add_option("-o,--out-dir", ingest_args.out_dir, "Output directory")->required();

    AnalyzeArgs analyze_args;
    auto* ana = app.add_subcommand("analyze", "Compute revisit statistics and fits");
    add_input_options(ana, analyze_args.in);
    add_bot_options(ana, analyze_args.bot);
    ana->add_option("-o,--out-dir", analyze_args.out_dir, "Output directory")->required();
    ana->add_option("--base", analyze_args.base, "Histogram bin growth factor");
    ana->add_option("--tau-omega-base", analyze_args.tau_omega_base, "Omega bin growth factor");
    ana->add_option("--cohorts", analyze_args.cohorts, "User-activity cohort thresholds")
        ->delimiter(',');
    ana->add_option("--breakpoints", analyze_args.breakpoints, "Return-regime breakpoints (s)")
        ->delimiter(',');
    ana->add_flag("--mask-bots", analyze_args.mask_bots,
                  "Drop non-human pairs from the inter-visit statistics");
    ana->add_option("--threads", analyze_args.threads, "Worker cap (0 = auto)");
    ana->add_option("--fit-xmin", analyze_args.fit_x_min, "Fit support lower bound (0 = 1st pct)");
    ana->add_option("--fit-xmax", analyze_args.fit_x_max, "Fit support upper bound (0 = 99.9th pct)");

    BotscanArgs botscan_args;
    auto* bot = app.add_subcommand("botscan", "Label every pair human/periodic/burst");
    add_input_options(bot, botscan_args.in);
    add_bot_options(bot, botscan_args.bot);
    bot->add_option("-o,--out-dir", botscan_args.out_dir, "Output directory")->required();

    std::string report_dir;
    auto* rep = app.add_subcommand("report", "Print the summary of a finished analyze run");
    rep->add_option("-d,--dir", report_dir, "Analyze output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gen_args);
        if (ing->parsed()) return cmd_ingest(ingest_args);
        if (ana->parsed()) return cmd_analyze(analyze_args);
        if (bot->parsed()) return cmd_botscan(botscan_args);
        if (rep->parsed()) return cmd_report(report_dir);
    } catch (const EmptyResultError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmpty;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitFatal;
}
