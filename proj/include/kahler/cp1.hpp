#pragma once

#include <optional>
#include <vector>

#include "kahler/symplectic.hpp"

namespace kahler {

/// S^1-invariant CP^1 in the moment coordinate of a reference symplectic
/// potential.  Nodes m_j = j/M, j = 0..M, include both poles.  Invariant
/// functions are sampled at the nodes; (1,1)-forms are stored as their ratio
/// to omega, and int_X f omega = 2 pi int_0^1 f dm.
class Cp1 {
 public:
  /// Rejects M < 8 and potentials that are not strictly convex.
  static Cp1 make(int cells, SymplecticPotential w);

  int cells() const noexcept { return cells_; }
  std::size_t nodes() const noexcept { return static_cast<std::size_t>(cells_) + 1; }
  double spacing() const noexcept { return 1.0 / cells_; }
  double coord(std::size_t j) const noexcept { return static_cast<double>(j) / cells_; }

  const SymplecticPotential& potential() const noexcept { return w_; }
  /// D(m_j) = 1/w''(m_j).
  const std::vector<double>& reduced_density() const noexcept { return d_; }
  /// D at the cell midpoints m_{j+1/2}.
  const std::vector<double>& reduced_density_mid() const noexcept { return d_mid_; }
  double reduced_density_slope(std::size_t end) const noexcept { return end == 0 ? d1_lo_ : d1_hi_; }
  /// Scalar curvature of omega at the nodes.
  const std::vector<double>& scalar_curvature() const noexcept { return s0_; }
  /// Summation-by-parts quadrature weights for int_0^1 dm (exact for cubics).
  const std::vector<double>& weights() const noexcept { return q_; }
  /// int_X omega (2 pi for every admissible potential).
  double volume() const noexcept { return volume_; }
  /// log-coordinate s = w'(m) at the nodes (infinite at the poles).
  double log_coord(std::size_t j) const;

 private:
  int cells_ = 0;
  SymplecticPotential w_;
  std::vector<double> d_, d_mid_, s0_, q_;
  double d1_lo_ = 1.0, d1_hi_ = -1.0;
  double volume_ = 0.0;
};

/// A positive (1,1)-form on the cp1 backend: its ratio to omega and, when known
/// in closed form, the cumulative mass fraction int_0^m ratio.
struct Cp1Density {
  std::vector<double> ratio;
  std::optional<std::vector<double>> cumulative;
};

namespace cp1 {

/// d/dm by the summation-by-parts derivative (fourth order inside, second near the poles).
std::vector<double> d_dm(const Cp1& x, const std::vector<double>& f);
/// Reduced coefficient of dbar f against dz-bar/z-bar: f_s = D f'.
std::vector<double> dbar(const Cp1& x, const std::vector<double>& f);
/// Ratio (i ddbar f)/omega = (D f')' in flux form; integrates to zero exactly.
std::vector<double> ddbar(const Cp1& x, const std::vector<double>& f);
/// |dbar f|^2 measured by the metric whose ratio to omega is `ratio`: D f'^2 / ratio.
std::vector<double> dbar_norm2(const Cp1& x, const std::vector<double>& f,
                               const std::vector<double>& ratio);
/// <dbar f, dbar g> for the same metric (real for invariant data).
std::vector<double> dbar_inner(const Cp1& x, const std::vector<double>& f,
                               const std::vector<double>& g, const std::vector<double>& ratio);

/// int_X f omega for a ratio f.
double integrate(const Cp1& x, const std::vector<double>& f);
/// Mean of f against omega.
double omega_mean(const Cp1& x, const std::vector<double>& f);
/// Total mass of a density: exact from the cumulative when present, by quadrature otherwise.
double mass(const Cp1& x, const Cp1Density& d);

/// Mean-zero u with (i ddbar u)/omega = rho, through the flux D u' = int_0^m rho.
/// Uses rho's exact cumulative when present, the fourth-order running
/// integral otherwise.  Throws CompatibilityError when |int rho omega| > tol V.
std::vector<double> poisson_solve(const Cp1& x, const Cp1Density& rho, double tol = 1e-8);

/// Invariant (0,1)-forms carry no harmonic part: always 0.
inline double harmonic_part(const Cp1&, const std::vector<double>&) { return 0.0; }

/// omega + i ddbar u as a density; throws PositivityError if it is not positive.
Cp1Density metric_of(const Cp1& x, const std::vector<double>& u);

}  // namespace cp1

/// CP^1 x CP^1 with product form omega_1 + omega_2 on an (M+1)^2 grid; index
/// i + (M+1) j with i along the first factor.
class Cp1Product {
 public:
  static Cp1Product make(int cells, SymplecticPotential w1, SymplecticPotential w2);

  const Cp1& first() const noexcept { return a_; }
  const Cp1& second() const noexcept { return b_; }
  std::size_t side() const noexcept { return a_.nodes(); }
  std::size_t nodes() const noexcept { return side() * side(); }
  /// int omega^2/2! = (2 pi)^2.
  double volume() const noexcept { return a_.volume() * b_.volume(); }

 private:
  Cp1 a_, b_;
};

namespace product {

/// Sum f1(m1) + f2(m2) on the grid.
std::vector<double> split_sum(const Cp1Product& x, const std::vector<double>& f1,
                              const std::vector<double>& f2);
/// int f omega^2/2! for a ratio f.
double integrate(const Cp1Product& x, const std::vector<double>& f);
double omega_mean(const Cp1Product& x, const std::vector<double>& f);

/// Hessian data of u in ratio form: A1 = (D1 u_1)_1, A2 = (D2 u_2)_2 and the
/// mixed term D1 D2 u_12^2 entering the determinant.
struct HessianRatios {
  std::vector<double> a1, a2, mixed_sq, mixed;  ///< mixed = sqrt(D1 D2) u_12 with sign
};
HessianRatios hessian(const Cp1Product& x, const std::vector<double>& u);

/// (omega + s i ddbar u)^2/2! against omega^2/2!.
std::vector<double> monge_ampere_ratio(const Cp1Product& x, const HessianRatios& h, double s = 1.0);

/// |dbar f|^2 measured by omega + i ddbar u, in closed form for the 2x2 metric.
std::vector<double> dbar_norm2(const Cp1Product& x, const std::vector<double>& f,
                               const std::vector<double>& u);
/// <dbar f, dbar g> measured by omega + i ddbar u.
std::vector<double> dbar_inner(const Cp1Product& x, const std::vector<double>& f,
                               const std::vector<double>& g, const std::vector<double>& u);

}  // namespace product
}  // namespace kahler
