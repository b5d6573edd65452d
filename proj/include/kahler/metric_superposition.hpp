#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace kahler {

/// Square n x n grid with spacing h and lower-left corner (x0, y0); mask
/// marks the planar domain (a disk or a strip).  Index i + n j.
struct DomainGrid {
  int n = 0;
  double h = 0.0;
  double x0 = 0.0, y0 = 0.0;
  std::vector<unsigned char> mask;
  int margin = 4;  ///< boundary band (in nodes) excluded from minima

  double x(int i) const noexcept { return x0 + h * i; }
  double y(int j) const noexcept { return y0 + h * j; }
  bool same_as(const DomainGrid& o) const noexcept;
};

/// Disk |tau| < radius sampled on the n x n grid covering [-radius, radius]^2.
DomainGrid disk_grid(int n, double radius);
/// Strip a < Re tau < a + length on [a, a + length] x [-length/2, length/2].
DomainGrid strip_grid(int n, double a, double length);

/// g |dtau|^2 on a domain; g > 0 at every domain node.
struct ConformalMetric {
  DomainGrid grid;
  std::vector<double> g;
};

ConformalMetric metric_from(const DomainGrid& grid, const std::function<double(double, double)>& g);
/// c 4 rho^2 / (rho^2 - |tau - p|^2)^2: the hyperbolic metric of the disk |tau - p| < rho
/// scaled by c, with Delta log g = g/(2c).  The disk must contain the domain.
ConformalMetric scaled_poincare(const DomainGrid& grid, double c, std::complex<double> p = 0.0, double rho = 1.0);

/// Delta log g - a g with Delta = d^2/dtau dtau-bar = (1/4)(d_xx + d_yy)
/// (sixth-order seven-point Laplacian); +infinity off the scored interior.
struct MarginField {
  std::vector<double> margin;
  double min = 0.0;
};
MarginField curvature_margin(const ConformalMetric& g, double a, bool use_parallel = true);

/// Pointwise sum of nu_a g_a.
ConformalMetric superpose(const std::vector<ConformalMetric>& family, const std::vector<double>& nu);

struct PropCheck {
  double mass = 0.0;             ///< C = sum nu
  double margin = 0.0;           ///< min of Delta log g - (a/C) g
  double member_identity = 0.0;  ///< min over members of (Delta g_a - a g_a^2 - |dg_a|^2/g_a) / g_a^2
  double cauchy_gradient = 0.0;  ///< min of g int |dg_a|^2/g_a dnu - |dg|^2
  double cauchy_mass = 0.0;      ///< min of C int g_a^2 dnu - g^2
  std::vector<double> member_margins;
};
/// Throws PreconditionError when a member's curvature margin at a is below -tol.
PropCheck prop_check(const std::vector<ConformalMetric>& family, const std::vector<double>& nu, double a,
                     double tol = 1e-6);

}  // namespace kahler
