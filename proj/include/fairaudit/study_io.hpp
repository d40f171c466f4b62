#pragma once

#include <iosfwd>
#include <string>

#include "fairaudit/simulation.hpp"

namespace fairaudit::sim {

// One row per (replication, method, metric):
// rep,scenario,method,metric,estimate,se,covered
void write_replications_csv(std::ostream& out, const SimulationSummary& s);

// Oracle truth, score model, per-cell bias/MSE/RE/coverage and failures.
std::string summary_to_json(const SimulationSummary& s);

// Grouped bar charts (one group per metric, one bar per method).
std::string bias_chart_svg(const SimulationSummary& s);
std::string re_chart_svg(const SimulationSummary& s);

// Writes replications.csv, summary.json and, with `plots`, bias.svg and
// re.svg into `dir` (created when missing).
void write_study_outputs(const std::string& dir, const SimulationSummary& s,
                         bool plots);

}  // namespace fairaudit::sim
