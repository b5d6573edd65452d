#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kahler/flows.hpp"
#include "kahler/manifold.hpp"
#include "kahler/symplectic.hpp"

namespace kahler {

/// Uniform time grid t_i = start + i step, i = 0..count-1.
struct TimeGrid {
  double start = 0.0;
  double step = 0.0;
  int count = 0;

  static TimeGrid uniform(double first, double last, int count);
  double at(int i) const noexcept { return start + step * i; }
  double last() const noexcept { return at(count - 1); }
};

enum class Provenance { induced, toric, manual };
const char* to_string(Provenance p);

/// How the additive constant of u_t is fixed.
struct GaugeRecord {
  enum class Kind { energy_zero, legendre, affine };
  Kind kind = Kind::energy_zero;
  /// For affine gauges: u_t -> u_t + offset + slope t (on top of the base gauge).
  double offset = 0.0;
  double slope = 0.0;
};
const char* to_string(GaugeRecord::Kind k);

/// A family of potentials over a real time grid (k = 1) or a product of two
/// grids (k = 2).  Potentials are evaluated from a closed-form generator at any
/// time, so velocities are centred five-point differences with step h_t
/// (Richardson-extrapolated once).  Samples at the grid nodes are cached.
class GeodesicPath {
 public:
  using Generator = std::function<std::vector<double>(double t1, double t2)>;

  /// Positivity of omega_t is checked on the discrete Hessian of every cached
  /// sample unless `discrete_positivity` is false (induced paths assert it on
  /// the exact pullback density instead).
  GeodesicPath(Manifold x, std::vector<TimeGrid> grids, Generator gen, GaugeRecord gauge,
               Provenance origin, double derivative_step, bool discrete_positivity = true);

  const Manifold& manifold() const noexcept { return x_; }
  int time_dimension() const noexcept { return static_cast<int>(grids_.size()); }
  const std::vector<TimeGrid>& grids() const noexcept { return grids_; }
  const TimeGrid& grid() const noexcept { return grids_.front(); }
  const GaugeRecord& gauge() const noexcept { return gauge_; }
  Provenance origin() const noexcept { return origin_; }
  double derivative_step() const noexcept { return ht_; }
  const char* derivative_method() const noexcept { return "five-point centred (one Richardson step)"; }

  /// u at an arbitrary time (t2 ignored for k = 1).
  std::vector<double> potential(double t1, double t2 = 0.0) const;
  /// Cached u at grid node i (k = 1) or (i, j) (k = 2).
  const std::vector<double>& sample(int i, int j = 0) const;

  /// d/dt u (k = 1) or d/dt_axis u (k = 2).
  std::vector<double> velocity(double t1, double t2 = 0.0, int axis = 0) const;
  /// d^2/dt_a dt_b u.
  std::vector<double> acceleration(double t1, double t2 = 0.0, int a = 0, int b = 0) const;

  /// Restriction of a k = 2 path to the line t = origin + s direction.
  GeodesicPath restrict_line(std::array<double, 2> origin, std::array<double, 2> direction,
                             TimeGrid s_grid) const;
  /// u_t + offset + slope t: a manually gauged copy.
  GeodesicPath regauged(double offset, double slope) const;
  /// u_t + f(t, node) for negative controls; provenance becomes manual.
  GeodesicPath perturbed(std::function<double(double, std::size_t)> f) const;

 private:
  Manifold x_;
  std::vector<TimeGrid> grids_;
  Generator gen_;
  GaugeRecord gauge_;
  Provenance origin_;
  double ht_;
  bool discrete_positivity_;
  std::vector<std::vector<double>> cache_;
};

/// Options for the induced construction.
struct InducedOptions {
  /// How u_t is obtained from F_t*omega.
  ///   poisson:  dbar-dbar Poisson solve of F_t*omega - omega, energy gauge by quadrature.
  ///   legendre: (cp1 and product only) the exact Kaehler potential of the flow
  ///             through the symplectic potential; the energy gauge uses
  ///             E = -2 pi int (w_t - w_0) dm.  Stays accurate at large |t|
  ///             where the pullback concentrates below grid scale.
  enum class Route { poisson, legendre };
  Route route = Route::poisson;
  /// Build the canonical path even when V -| omega is not dbar-exact.
  bool override_exactness = false;
  /// Step for time derivatives; default 4/N on the backend's grid.
  std::optional<double> derivative_step;
  double tol = 1e-8;
};

/// Aubin-Yau energy E(u) with E(0) = 0 and dE = int u-dot omega_u^n/n!.
enum class EnergyRoute { segment_quadrature, polynomial };
double aubin_yau_energy(const Manifold& x, const std::vector<double>& u,
                        EnergyRoute route = EnergyRoute::segment_quadrature);

/// Relative potential of F_t*omega against omega, before any gauge: the
/// mean-zero Poisson solution.
std::vector<double> pullback_potential(const HoloField& v, const Manifold& x, double t, double tol = 1e-8);

/// The canonical path u_t = poisson_solve(F_t*omega - omega) + c(t) with
/// E(u_t) = 0.  Throws ObstructionError unless V -| omega is dbar-exact or
/// the override is set.
GeodesicPath induced_geodesic(const HoloField& v, const Manifold& x, TimeGrid grid,
                              const InducedOptions& opt = {});

/// Two-parameter path for a commuting product tuple on CP^1 x CP^1.
GeodesicPath multi_geodesic(const ProductDilation& v, const Cp1Product& x, TimeGrid g1, TimeGrid g2,
                            const InducedOptions& opt = {});

/// w_t = (1-t) w0 + t w1 (any t where it stays convex), realised as Kaehler
/// potentials relative to w0 by Legendre transform on the cp1 grid of w0.
GeodesicPath toric_geodesic(const Cp1& x0, const SymplecticPotential& w1, TimeGrid grid,
                            std::optional<double> derivative_step = std::nullopt);
/// Closed-form velocity of the toric path: -(w1 - w0)(mu_t(m)).
std::vector<double> toric_velocity(const Cp1& x0, const SymplecticPotential& w1, double t);

/// phi_t - phi_0 at the point with reference moment m, where phi_t is the
/// Legendre dual of w_t; finite up to the poles.
double legendre_relative_potential(const SymplecticPotential& w0, const SymplecticPotential& wt, double m);
/// Aubin-Yau energy of the Legendre-gauged relative potential: -2 pi int (w_t - w_0) dm.
double legendre_energy(const SymplecticPotential& w0, const SymplecticPotential& wt);

/// Geodesic residual c = (u_tt - |dbar u_t|^2_t)/4 along a k = 1 path.
struct Residual {
  std::vector<double> c;
  double mean = 0.0;       ///< omega_t mean of c (the time gauge)
  double deviation = 0.0;  ///< sup |c - mean|
};
Residual geodesic_residual(const GeodesicPath& path, double t);
/// Sup of the top-degree form Omega^{n+1}/(n+1)! after the time gauge, as a
/// density against i dtau^dtau-bar ^ omega^n/n!.
double hcmae_residual(const GeodesicPath& path, double t);
/// k = 2: max over (a, b) of sup |u_ab - <dbar u_a, dbar u_b>_t - gauge|.
double multi_geodesic_system_residual(const GeodesicPath& path, double t1, double t2);

/// sup{T : w0 + t dw strictly convex for all |t| < T}, separately for t > 0
/// and t < 0.  Infinite when dw is affine.
struct ExtensionTime {
  double forward = 0.0;
  double backward = 0.0;
};
ExtensionTime max_extension_time(const SymplecticPotential& w0, const Polynomial& dw);

/// Large-time behaviour of a k = 1 path.
struct AsymptoticReport {
  double time = 0.0;
  std::vector<double> velocity;  ///< u-dot_T
  std::vector<double> slope;     ///< u_T / T
  double limit = 0.0;            ///< g* = essential max of u-dot_T
  std::vector<double> sup_norms; ///< sup |u-dot_t| over the t-sample
  double sup_norm_spread = 0.0;
  double velocity_deviation_measure = 0.0;  ///< omega_T-measure where |u-dot_T - g*| > eps
  double slope_deviation_measure = 0.0;     ///< omega-measure where |u_T/T - g*| > eps
};
/// Deviation sets are measured by omega on X: eps_velocity for u-dot_T and
/// eps_slope for u_T/T.
AsymptoticReport asymptotic_slope(const GeodesicPath& path, double big_t, const std::vector<double>& t_sample,
                                  double eps_velocity, double eps_slope);

/// One CSV per time node plus manifest.json with grid metadata and gauge.
void write_path_bundle(const GeodesicPath& path, const std::filesystem::path& dir);

}  // namespace kahler
