#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "revisit/botfilter.hpp"
#include "revisit/histogram.hpp"
#include "revisit/ingest.hpp"
#include "revisit/powerlaw.hpp"
#include "revisit/stats.hpp"
#include "revisit/synthgen.hpp"

namespace revisit {

using Json = nlohmann::json;

// ---- enum names -------------------------------------------------------------

std::string_view to_string(BotLabel label);
std::string_view to_string(SourceKind kind);
std::string_view to_string(TailModel model);
SourceKind source_kind_from_string(std::string_view name);

// ---- plot-ready JSON --------------------------------------------------------

Json histogram_json(const LogHistogram& h);
Json fit_json(const PowerLawFit& fit);
Json return_curve_json(const ReturnCurve& curve);
Json ingest_report_json(const IngestReport& report);
Json totals_json(const CorpusTotals& totals);

// ---- plot-ready TSV ---------------------------------------------------------

/// `lower_edge \t upper_edge \t density`
void write_histogram_tsv(std::ostream& out, const LogHistogram& h);
/// `omega_lo \t omega_hi \t pairs \t median_tau_omega`
void write_tau_omega_tsv(std::ostream& out, const TauOmegaCurve& curve);
/// `user \t url \t label \t cv \t span_fraction \t omega`
void write_verdicts_tsv(std::ostream& out, const std::vector<BotVerdict>& verdicts);
/// Canonical event format: `t \t user \t url`, ASCII decimal, LF line ends.
void write_events_tsv(std::ostream& out, std::span<const VisitEvent> events);

// ---- generator spec / ground truth round-trip -------------------------------

Json population_spec_json(const PopulationSpec& spec);
PopulationSpec population_spec_from_json(const Json& j);

Json ground_truth_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& j);

}  // namespace revisit
