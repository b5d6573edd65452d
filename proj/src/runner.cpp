#include "kahler/runner.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

namespace kahler {

namespace {

std::string prefix(int id) { return id ? "c" + std::to_string(id) + "_" : "info_"; }

Outcome failed(const std::string& experiment, int id, const std::exception& e) {
  Outcome o;
  o.record.experiment = experiment;
  o.record.criterion = id;
  o.record.quantity = id ? criteria()[id - 1].title : "informational experiment";
  o.record.pass = false;
  o.record.detail = "error in " + experiment + (id ? " (criterion " + std::to_string(id) + ")" : "") + ": " + e.what();
  return o;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"geodesic", "dh", "sets", "moment", "kenergy", "leaves", "prop-superpose", "all"};
  return s;
}

std::vector<int> criteria_of(const std::string& sub) {
  std::vector<int> ids;
  for (const auto& c : criteria())
    if (sub == "all" || sub == c.subcommand) ids.push_back(c.id);
  if (ids.empty()) throw PreconditionError("unknown subcommand '" + sub + "'");
  return ids;
}

std::vector<Outcome> run_experiment(const std::string& sub, const ExperimentConfig& c) {
  std::vector<Outcome> out;
  if (sub == "dh" && c.dh_kind == "torus") {
    try {
      out.push_back(torus_point_mass(c.suite));
    } catch (const std::exception& e) {
      out.push_back(failed(sub, 0, e));
    }
    return out;
  }
  for (int id : criteria_of(sub)) {
    try {
      out.push_back(run_criterion(id, c.suite));
    } catch (const std::exception& e) {
      out.push_back(failed(sub, id, e));
    }
  }
  if (sub == "leaves") {
    try {
      out.push_back(leaf_burns(c.suite));
    } catch (const std::exception& e) {
      out.push_back(failed(sub, 0, e));
    }
  }
  return out;
}

void write_artifacts(const std::vector<Outcome>& outcomes, const ExperimentConfig& c, const std::string& sub) {
  const std::string name = c.name.empty() ? sub : c.name;
  const auto dir = c.output / name;
  std::filesystem::create_directories(dir);
  std::vector<ReportRecord> records;
  for (const auto& o : outcomes) {
    records.push_back(o.record);
    const std::string p = prefix(o.record.criterion);
    for (const auto& t : o.tables) write_csv(dir / (p + t.name + ".csv"), t);
    if (!c.plots) continue;
    for (const auto& spec : o.plots) {
      std::ofstream svg(dir / (p + spec.name + ".svg"));
      svg << render_svg(spec, o.tables);
    }
  }
  write_report(dir / "report.json", name, c.suite.seed, records);
}

int run(const std::string& sub, const ExperimentConfig& c, std::ostream& log) {
  const auto outcomes = run_experiment(sub, c);
  write_artifacts(outcomes, c, sub);
  bool ok = true;
  for (const auto& o : outcomes) {
    const auto& r = o.record;
    ok = ok && r.pass;
    log << (r.pass ? "PASS" : "FAIL") << "  " << (r.criterion ? "criterion " + std::to_string(r.criterion) : "info")
        << ": " << r.quantity;
    if (r.trend_slope == r.trend_slope) log << "  (trend slope " << r.trend_slope << ", lsq residual " << r.trend_residual << ")";
    if (!r.detail.empty()) log << "  [" << r.detail << "]";
    log << '\n';
  }
  log << "report: " << (c.output / (c.name.empty() ? sub : c.name) / "report.json").string() << '\n';
  return ok ? 0 : 1;
}

}  // namespace kahler
