#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kahler/config.hpp"

namespace kahler {

/// geodesic, dh, sets, moment, kenergy, leaves, prop-superpose, all.
const std::vector<std::string>& subcommands();
/// Criterion ids a subcommand evaluates (`all`: every criterion).
std::vector<int> criteria_of(const std::string& subcommand);

/// Runs the experiments of a subcommand.  Library errors become failing
/// records that name the experiment and criterion.
std::vector<Outcome> run_experiment(const std::string& subcommand, const ExperimentConfig& c);

/// Writes <output>/<name>/report.json, one CSV per table and, when enabled, one
/// SVG per plot.  Files are prefixed c<id>_ (info_ for informational records).
void write_artifacts(const std::vector<Outcome>& outcomes, const ExperimentConfig& c, const std::string& subcommand);

/// run_experiment + write_artifacts + a one-line summary per record on `log`.
/// Returns 0 iff every record passes.
int run(const std::string& subcommand, const ExperimentConfig& c, std::ostream& log);

}  // namespace kahler
