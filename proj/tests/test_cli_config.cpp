#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kahler/runner.hpp"

using namespace kahler;

namespace {

std::string schema_key(const std::string& ini) {
  std::istringstream in(ini);
  try {
    parse_config(in);
  } catch (const SchemaError& e) {
    return e.key();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / ("kahlerlab_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("defaults carry the pinned acceptance values") {
  const ExperimentConfig c;
  CHECK(c.suite.ladder == std::vector<int>{64, 128, 256, 512});
  CHECK(c.suite.tol.closed_form == 1e-6);
  CHECK(c.suite.tol.min_order == 1.8);
  CHECK(c.suite.tol.periodicity == 1e-8);
  CHECK(c.suite.tol.dh_slope == 0.9);
  CHECK(c.suite.tol.energy_affine == 1e-7);
  CHECK(c.suite.tol.superposition_margin == 1e-6);
  CHECK(c.suite.tol.equality_margin == 1e-4);
  CHECK(c.suite.range_samples == 100);
  CHECK(c.suite.families == 100);
  CHECK(c.suite.superposition_grid == 256);
  CHECK(c.suite.horizon == 20.0);
  for (const auto& k : tolerance_keys()) CHECK(c.suite.tol.*k.member > 0.0);
}

TEST_CASE("config parsing") {
  std::istringstream in(R"(
[experiment]
name = run1
seed = 42
plots = false
[resolution]
ladder = 32, 64, 128
[dh]
kind = torus
times = -1, 1.5
[tolerances]
closed_form = 2e-6
)");
  const auto c = parse_config(in);
  CHECK(c.name == "run1");
  CHECK(c.suite.seed == 42);
  CHECK_FALSE(c.plots);
  CHECK(c.suite.ladder == std::vector<int>{32, 64, 128});
  CHECK(c.dh_kind == "torus");
  CHECK(c.suite.dh_times == std::vector<double>{-1.0, 1.5});
  CHECK(c.suite.tol.closed_form == 2e-6);
  std::istringstream empty("");
  CHECK(parse_config(empty).suite.ladder.size() == 4);
}

TEST_CASE("schema errors name the key path") {
  CHECK(schema_key("[tolerances]\nclosed_form = -1e-6\n") == "tolerances.closed_form");
  CHECK(schema_key("[tolerances]\nmin_order = 0\n") == "tolerances.min_order");
  CHECK(schema_key("[resolution]\nladder = 64,64,128\n") == "resolution.ladder");
  CHECK(schema_key("[resolution]\nladder = 64,128\n") == "resolution.ladder");
  CHECK(schema_key("[resolution]\nladder = 64,abc,128\n") == "resolution.ladder");
  CHECK(schema_key("[resolution]\ntorus_cells = 48\n") == "resolution.torus_cells");
  CHECK(schema_key("[geodesic]\ndilation = fast\n") == "geodesic.dilation");
  CHECK(schema_key("[geodesic]\nspeed = 1\n") == "geodesic.speed");
  CHECK(schema_key("[dh]\nkind = sphere\n") == "dh.kind");
  CHECK(schema_key("[experiment]\nplots = maybe\n") == "experiment.plots");
  CHECK(schema_key("[kenergy]\ntoric_bump = 4\n") == "kenergy.toric_bump");
  CHECK(schema_key("stray = 1\n") == "stray");
  CHECK(schema_text().find("closed_form (real > 0, default 1e-06)") != std::string::npos);
}

TEST_CASE("resolution override rescales both ladders") {
  ExperimentConfig c;
  apply_resolution_override(c, 256);
  CHECK(c.suite.ladder == std::vector<int>{32, 64, 128, 256});
  CHECK(c.suite.product_ladder == std::vector<int>{16, 32, 64, 128});
  ExperimentConfig d;
  CHECK_THROWS_AS(apply_resolution_override(d, 32), SchemaError);
}

TEST_CASE("subcommands partition the twelve criteria") {
  CHECK(criteria().size() == 12);
  std::multiset<int> seen;
  for (const auto& s : subcommands())
    if (s != "all")
      for (int id : criteria_of(s)) seen.insert(id);
  CHECK(seen.size() == 12);
  for (int id = 1; id <= 12; ++id) CHECK(seen.count(id) == 1);
  CHECK(criteria_of("all").size() == 12);
  CHECK_THROWS_AS(criteria_of("nope"), PreconditionError);
}

TEST_CASE("dh on the flat torus: point mass at distance 0, exit 0") {
  ExperimentConfig c = load_config(std::filesystem::path(KAHLER_SOURCE_DIR) / "configs/torus_flat.ini");
  c.output = scratch("torus");
  std::ostringstream log;
  CHECK(run("dh", c, log) == 0);
  const auto j = nlohmann::json::parse(slurp(c.output / "torus_flat/report.json"));
  CHECK(j["seed"] == 1);
  CHECK(j["pass"] == true);
  REQUIRE(j["records"].size() == 1);
  CHECK(j["records"][0]["values"]["distance"] == 0.0);
  CHECK(j["records"][0]["values"]["mass_off_zero"] == 0.0);
}

TEST_CASE("geodesic run: trend slope, artifacts and determinism") {
  ExperimentConfig c = load_config(std::filesystem::path(KAHLER_SOURCE_DIR) / "configs/cp1_rotation.ini");
  c.output = scratch("geodesic");
  std::ostringstream log;
  CHECK(run("geodesic", c, log) == 0);
  const auto dir = c.output / "cp1_rotation";
  const std::string first = slurp(dir / "report.json");
  const auto j = nlohmann::json::parse(first);
  CHECK(j["seed"] == 7);
  REQUIRE(j["records"].size() == 3);
  const auto& r1 = j["records"][0];
  CHECK(r1["criterion"] == 1);
  CHECK(r1["trend_slope"].get<double>() >= 1.8);
  CHECK(r1["trend_residual"].is_number());
  CHECK(std::filesystem::exists(dir / "c1_residual_trend.csv"));
  CHECK(slurp(dir / "c1_residual_trend.svg").rfind("<svg", 0) == 0);
  CHECK(slurp(dir / "c1_residual_trend.csv").rfind("cells,deviation\n64,", 0) == 0);

  c.plots = false;
  c.output = scratch("geodesic_again");
  CHECK(run("geodesic", c, log) == 0);
  CHECK(slurp(c.output / "cp1_rotation/report.json") == first);
  CHECK_FALSE(std::filesystem::exists(c.output / "cp1_rotation/c1_residual_trend.svg"));
}

TEST_CASE("downstream errors become failing records with context") {
  ExperimentConfig c;
  c.suite.torus_cells = 24;  // bypasses the schema; the torus backend rejects it
  const auto out = run_experiment("geodesic", c);
  REQUIRE(out.size() == 3);
  CHECK_FALSE(out[1].record.pass);
  CHECK(out[1].record.detail.find("criterion 2") != std::string::npos);
  CHECK(out[0].record.pass);
}

TEST_CASE("tables, JSON and SVG emission") {
  Table t{"demo", {}, {}};
  t.add("x", {1, 2, 3}).add("y", {1, NAN, 9});
  CHECK_THROWS_AS(t.add("z", {1.0}), PreconditionError);
  const auto dir = scratch("emit");
  write_csv(dir / "demo.csv", t);
  CHECK(slurp(dir / "demo.csv") == "x,y\n1,1\n2,nan\n3,9\n");
  ReportRecord r;
  r.set("a", 1.0).set("b", INFINITY).set("a", 2.0);
  const auto j = to_json(r);
  CHECK(j["values"]["a"] == 2.0);
  CHECK(j["values"]["b"].is_null());
  CHECK(j["values"].begin().key() == "a");
  CHECK(j["trend_slope"].is_null());

  PlotSpec p;
  p.table = "demo";
  p.x = "x";
  p.ys = {"y"};
  p.log_y = true;
  CHECK(render_svg(p, {t}).find("<polyline") != std::string::npos);
  p.kind = PlotSpec::Kind::polygon;
  p.ys = {"x:y"};
  CHECK(render_svg(p, {t}).find("<polygon") != std::string::npos);
  p.ys = {"x:w"};
  CHECK_THROWS_AS(render_svg(p, {t}), PreconditionError);
}
