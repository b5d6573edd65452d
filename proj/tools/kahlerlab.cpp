// Experiment runner: kahlerlab <subcommand> [--config FILE] [--out DIR] ...
// Exit status: 0 when every record passes, 1 on a FAIL record, 2 on a
// usage or schema error.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kahler/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of geodesics, pushforward measures and K-energy bounds on model Kaehler manifolds"};
  app.require_subcommand(0, 1);
  app.fallthrough();  // global flags may follow the subcommand
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int resolution = 0;
  bool no_plots = false, list = false;
  app.add_option("--config", config_path, "INI config (every key optional)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output root, overrides experiment.output");
  auto* seed_opt = app.add_option("--seed", seed, "random seed, overrides experiment.seed");
  auto* res_opt = app.add_option("--resolution-override", resolution, "finest cp1 level; ladders are rescaled");
  app.add_flag("--no-plots", no_plots, "skip SVG output");
  app.add_flag("--list-criteria", list, "print the acceptance criteria and exit");
  for (const auto& s : kahler::subcommands()) {
    std::string about = "criteria";
    for (int id : kahler::criteria_of(s)) about += " " + std::to_string(id);
    app.add_subcommand(s, s == "all" ? "full acceptance suite" : about);
  }
  app.footer("Config schema:\n" + kahler::schema_text());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list) {
    for (const auto& c : kahler::criteria())
      std::cout << c.id << "  [" << c.subcommand << "] " << c.title << ": " << c.statement << '\n';
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "a subcommand is required\n" << app.help();
    return 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  kahler::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = kahler::load_config(config_path);
    if (!out_dir.empty()) cfg.output = out_dir;
    if (*seed_opt) cfg.suite.seed = seed;
    if (*res_opt) kahler::apply_resolution_override(cfg, resolution);
    if (no_plots) cfg.plots = false;
    kahler::validate(cfg);
  } catch (const kahler::SchemaError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  try {
    return kahler::run(sub, cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << sub << ": " << e.what() << '\n';
    return 2;
  }
}
