#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kahler/geodesics.hpp"

namespace kahler {

/// Monge-Ampere leaves, theta and the K-energy on the S^1-invariant CP^1
/// backend (n = 1).  Leaves are followed in the reference moment coordinate y:
/// the leaf through x keeps the omega_t-moment G_t(y) = y + D u_t'(y) fixed,
/// so dy/dt = -D u-dot'/R with R = 1 + (D u')' the density ratio of omega_t.

/// Coefficient eta of the radial field V_t = eta z d/dz with
/// V_t -| omega_t = i dbar u-dot_t, at every node: eta = u-dot'/(2R).
std::vector<double> leaf_field(const GeodesicPath& path, double t);

/// Record of the leaf parametrization tau -> (tau, f^x(tau)).
struct LeafParametrization {
  std::string chart = "z";  ///< chart of the log-density (z near the pole m = 0)
  std::string coordinate = "reference moment y";
  std::string time = "real t = Re tau (Im-independent data)";
};

struct LeafTrajectory {
  double start = 0.0;                ///< x, as its reference moment
  TimeGrid times;
  std::vector<double> position;      ///< y(t), with y(0) = start
  std::vector<double> ratio;         ///< omega_t/omega at the leaf point
  std::vector<double> log_density;   ///< l(t) in the z chart
  std::vector<double> log_density_far;  ///< l(t) in the 1/z chart
  LeafParametrization parametrization;
};

/// Leaf field tables of one path on a strip grid, shared by many leaves.  The
/// strip must contain t = 0 as a node; leaves are integrated by RK4 with step
/// (strip step)/2 from t = 0 in both directions, so the field is tabulated on a
/// grid four times finer than the strip.
class LeafSolver {
 public:
  LeafSolver(const GeodesicPath& path, TimeGrid strip);

  const GeodesicPath& path() const noexcept { return *path_; }
  const Cp1& manifold() const noexcept { return x_; }
  const TimeGrid& strip() const noexcept { return strip_; }

  LeafTrajectory trace(double start) const;
  std::vector<LeafTrajectory> trace(const std::vector<double>& starts) const;

  /// d y/dt and omega_t/omega at (fine time index, y).
  double drift(int fine, double y) const;
  double ratio(int fine, double y) const;
  /// Fine index of strip node i.
  int fine_index(int i) const noexcept { return 4 * i; }

 private:
  const GeodesicPath* path_;
  Cp1 x_;
  TimeGrid strip_;
  int origin_ = 0;
  std::vector<std::vector<double>> drift_, ratio_, dbar_velocity_;
};

LeafTrajectory trace_leaf(const GeodesicPath& path, double start, TimeGrid strip);

/// max over the strip of |f_t*(omega_t) - omega_0| / omega at the start point,
/// with the Jacobian dy_t/dy_0 from the leaves through start -+ delta.
double leaf_pullback_check(const LeafSolver& solver, double start, double delta);
double leaf_pullback_check(const GeodesicPath& path, double start, TimeGrid strip);
/// Real-time leaves are Moser flows, so the pullback identity above holds for
/// any path; what needs the geodesic equation is that the leaf extends
/// holomorphically in tau, i.e. that eta stays constant along it.  Returns
/// sup_t |eta(t, f_t(x)) - eta(0, x)|.
double leaf_holomorphicity_defect(const LeafSolver& solver, double start);

/// kappa_x = l''/4 along a leaf and the curvature -(log kappa_x)''/(4 kappa_x)
/// of kappa_x i dtau^dtau-bar where kappa_x > kappa_floor.  Values are given
/// raw (five-point, strip step) and Richardson-combined with the doubled step;
/// entries without enough neighbours are NaN.
struct LeafTheta {
  std::vector<double> times;
  std::vector<double> kappa, kappa_richardson;
  std::vector<double> curvature, curvature_richardson;
  double kappa_sup = 0.0;
  double curvature_max = -std::numeric_limits<double>::infinity();  ///< over finite raw entries
};
LeafTheta theta_on_leaf(const LeafTrajectory& leaf, double kappa_floor = 1e-6, bool far_chart = false);
/// Burns: -2/n minus the largest leaf curvature (nonnegative when the bound holds).
double burns_margin(const LeafTheta& theta, int n = 1);

/// Density kappa(t) of Theta = i ddbar K against i dtau^dtau-bar.
struct ThetaDensity {
  TimeGrid times;
  std::vector<double> kappa;         ///< fiber integral of the leaf densities against omega_0
  std::vector<double> kappa_direct;  ///< (1/4) d/dt of the Mabuchi first derivative
  double discrepancy = 0.0;          ///< sup |kappa - kappa_direct|
  int leaves = 0;
};
struct ThetaOptions {
  double t_lo = -1.0, t_hi = 1.0;
  double step = 0.05;  ///< strip step; kappa is reported at the strip nodes in [t_lo, t_hi]
  int leaves = 64;     ///< stratified sample: midpoints of equal omega_0-mass cells
};
ThetaDensity kenergy_theta(const GeodesicPath& path, const ThetaOptions& opt = {});
/// Mabuchi first derivative dK/dt = -int u-dot (S_t - S-bar) omega_t, in the
/// integrated-by-parts form that needs three derivatives of u.
double mabuchi_derivative(const GeodesicPath& path, double t);

/// lhs = int Theta_test ^ Omega and rhs = int_X (int_{Y_x} Theta_test) omega_0
/// over the strip (per unit Im tau), Theta_test = i ddbar psi with psi(t, m)
/// smooth on a neighbourhood of the strip x [0, 1].
struct SuperpositionCheck {
  double lhs = 0.0, rhs = 0.0, gap = 0.0;
};
SuperpositionCheck superposition_check(const GeodesicPath& path, const std::function<double(double, double)>& psi,
                                       TimeGrid strip, int leaves = 64);

/// Hyperbolic density of the strip a < Re tau < a + length normalised by
/// Delta log lambda = lambda (Delta = d^2/dtau dtau-bar):
/// lambda = (pi/L)^2 / (2 sin^2(pi (t - a)/L)).
struct Strip {
  double a = 0.0;
  double length = 1.0;
  double density(double t) const;
};

struct CurvatureBoundReport {
  bool identically_zero = false;
  double constant_differential = 0.0;  ///< 2/(nV) in (1/4)(log kappa)'' >= (2/(nV)) kappa
  double constant_strip = 0.0;         ///< nV/2 in kappa <= (nV/2) lambda
  std::vector<double> times;
  std::vector<double> margin;          ///< (1/4)(log kappa)'' - (2/(nV)) kappa, NaN without neighbours
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> strip_excess;    ///< kappa - (nV/2) lambda
  double max_strip_excess = -std::numeric_limits<double>::infinity();
};
CurvatureBoundReport curvature_bound_check(const TimeGrid& times, const std::vector<double>& kappa, double volume,
                                           int n, std::optional<Strip> strip = std::nullopt,
                                           double kappa_floor = 1e-10);
inline CurvatureBoundReport curvature_bound_check(const ThetaDensity& theta, double volume, int n,
                                                  std::optional<Strip> strip = std::nullopt,
                                                  double kappa_floor = 1e-10) {
  return curvature_bound_check(theta.times, theta.kappa, volume, n, strip, kappa_floor);
}

/// Refinement tolerance tol(h) = 2 |q_h - q_{h/2}|.
inline double refinement_tolerance(double q_h, double q_half) { return 2.0 * std::abs(q_h - q_half); }

}  // namespace kahler
