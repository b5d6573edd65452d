#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kahler/report.hpp"

namespace kahler {

/// Acceptance thresholds.  Defaults are the pinned acceptance values; the CLI
/// may override them from a config, the acceptance binary never does.
struct Tolerances {
  double closed_form = 1e-6;          ///< 1: sup |u_t - closed form| at the finest level
  double min_order = 1.8;             ///< 1, 8, 9: observed refinement order
  double geodesic_runtime = 60.0;     ///< 1: seconds
  double periodicity = 1e-8;          ///< 2: ||u_{t+1} - u_t||
  double counterexample_ratio = 10.0; ///< 2: torus residual / induced residual
  double dh_slope = 0.9;              ///< 3: log-log decay slope of d(mu_0, mu_t)
  double dh_bin_widths = 2.0;         ///< 3: sup-CDF error against uniform, in bin widths
  double range_cells = 2.0;           ///< 4: Hausdorff and coverage, in grid cells
  double sup_norm = 1e-6;             ///< 5: spread of sup |u-dot_t|
  double slope_band = 1e-3;           ///< 5: |u_T/T - g*|
  double slope_measure = 1e-3;        ///< 5: exceptional set, as a fraction of V(X)
  double moment_cells = 2.0;          ///< 6: Hausdorff to the unit square, in cells
  double energy_affine = 1e-7;        ///< 7: max deviation from the affine fit
  double control_ratio = 10.0;        ///< 8: non-geodesic / geodesic pullback error
  double superposition_margin = 1e-6; ///< 12
  double equality_margin = 1e-4;      ///< 12: |margin| of the equality probe
  double superposition_runtime = 120.0;  ///< 12: seconds
};

struct ToleranceKey {
  const char* key;
  double Tolerances::*member;
  const char* meaning;
};
/// Config keys of every tolerance, in declaration order.
const std::vector<ToleranceKey>& tolerance_keys();

/// Parameters of the acceptance experiments.
struct SuiteOptions {
  std::vector<int> ladder{64, 128, 256, 512};          ///< cp1 cells, strictly increasing
  std::vector<int> product_ladder{32, 64, 128, 256};   ///< per-factor cells on CP^1 x CP^1
  std::uint64_t seed = 1;
  double dilation = 1.0;    ///< a in V = a z d/dz (real, > 0)
  double toric_bump = 1.0;  ///< c in w_1 = w_0 + c m^2 (1-m)^2
  int torus_cells = 64;     ///< counterexample grid (power of two)
  double torus_eps = 0.3;   ///< xi = 1 + eps cos(2 pi x1)
  int bins = 256;
  std::vector<double> dh_times{-2.0, -0.5, 0.5, 2.0};
  int range_samples = 100;
  double horizon = 20.0;    ///< T of the asymptotic slope
  int families = 100;
  int family_size = 10;
  int superposition_grid = 256;
  Tolerances tol;
};

struct CriterionInfo {
  int id;
  const char* title;
  const char* subcommand;  ///< CLI subcommand that evaluates it
  const char* statement;
};
/// The twelve acceptance criteria.
const std::vector<CriterionInfo>& criteria();

/// One evaluated criterion: its record plus CSV tables and plots.
struct Outcome {
  ReportRecord record;
  std::vector<Table> tables;
  std::vector<PlotSpec> plots;
};

/// Evaluates a criterion.  Library errors propagate; the caller decides how
/// to report them.
Outcome run_criterion(int id, const SuiteOptions& opt);

/// Informational experiments used by the CLI beyond the criteria.
/// DH pushforward of the canonical path of a translation on the flat torus.
Outcome torus_point_mass(const SuiteOptions& opt);
/// Leaf trace, pullback and Burns margin on one toric leaf.
Outcome leaf_burns(const SuiteOptions& opt);

}  // namespace kahler
