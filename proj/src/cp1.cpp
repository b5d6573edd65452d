#include "kahler/cp1.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kahler/conventions.hpp"
#include "kahler/error.hpp"

namespace kahler {

Cp1 Cp1::make(int cells, SymplecticPotential w) {
  if (cells < 8) throw PreconditionError("cp1 moment grid needs at least 8 cells");
  const double h = 1.0 / cells;
  // Convexity failure is reported at the first interior node with w'' <= 0.
  const Polynomial d2p = w.smooth_part().derivative().derivative();
  for (int j = 1; j < cells; ++j) {
    const double m = j * h;
    if (!(1.0 + m * (1.0 - m) * d2p(m) > 0.0)) {
      std::ostringstream os;
      os << "symplectic potential not strictly convex at m = " << m;
      throw PositivityError(os.str(), m);
    }
  }
  if (!(w.convexity_margin(8 * cells) > 0.0))
    throw PositivityError("symplectic potential not strictly convex between nodes", 0.5);

  Cp1 x;
  x.cells_ = cells;
  x.w_ = std::move(w);
  x.d_.resize(x.nodes());
  x.s0_.resize(x.nodes());
  x.d_mid_.resize(x.nodes() - 1);
  for (std::size_t j = 0; j < x.nodes(); ++j) {
    const Jet2 d = x.w_.reduced_density(x.coord(j));
    x.d_[j] = d.v;
    x.s0_[j] = -d.d2;
  }
  x.d_[0] = 0.0;
  x.d_[x.nodes() - 1] = 0.0;
  for (std::size_t j = 0; j + 1 < x.nodes(); ++j)
    x.d_mid_[j] = x.w_.reduced_density((j + 0.5) * h).v;
  x.d1_lo_ = x.w_.reduced_density(0.0).d1;
  x.d1_hi_ = x.w_.reduced_density(1.0).d1;
  x.q_ = sbp_weights(cells, h);
  double total = 0.0;
  for (double q : x.q_) total += q;
  x.volume_ = two_pi * total;
  return x;
}

double Cp1::log_coord(std::size_t j) const {
  if (j == 0) return -std::numeric_limits<double>::infinity();
  if (j + 1 == nodes()) return std::numeric_limits<double>::infinity();
  return w_.slope(coord(j));
}

namespace cp1 {

namespace {

void check_shape(const Cp1& x, std::size_t n) {
  if (n != x.nodes()) throw PreconditionError("cp1 field does not match the moment grid");
}

}  // namespace

std::vector<double> d_dm(const Cp1& x, const std::vector<double>& f) {
  check_shape(x, f.size());
  return sbp_derivative(f, x.spacing());
}

std::vector<double> dbar(const Cp1& x, const std::vector<double>& f) {
  auto d = d_dm(x, f);
  for (std::size_t j = 0; j < d.size(); ++j) d[j] *= x.reduced_density()[j];
  return d;
}

std::vector<double> ddbar(const Cp1& x, const std::vector<double>& f) {
  // Flux form (D f')' with the summation-by-parts derivative: the flux
  // vanishes at the poles, so int (i ddbar f) = 0 holds exactly.
  return d_dm(x, dbar(x, f));
}

std::vector<double> dbar_inner(const Cp1& x, const std::vector<double>& f,
                               const std::vector<double>& g, const std::vector<double>& ratio) {
  check_shape(x, ratio.size());
  const auto df = d_dm(x, f);
  const auto dg = d_dm(x, g);
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = x.reduced_density()[j] * df[j] * dg[j] / ratio[j];
  return out;
}

std::vector<double> dbar_norm2(const Cp1& x, const std::vector<double>& f,
                               const std::vector<double>& ratio) {
  return dbar_inner(x, f, f, ratio);
}

double integrate(const Cp1& x, const std::vector<double>& f) {
  check_shape(x, f.size());
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += x.weights()[j] * f[j];
  return two_pi * s;
}

double omega_mean(const Cp1& x, const std::vector<double>& f) { return integrate(x, f) / x.volume(); }

double mass(const Cp1& x, const Cp1Density& d) {
  if (d.cumulative) return two_pi * (d.cumulative->back() - d.cumulative->front());
  return integrate(x, d.ratio);
}

std::vector<double> poisson_solve(const Cp1& x, const Cp1Density& rho, double tol) {
  check_shape(x, rho.ratio.size());
  const double h = x.spacing();
  std::vector<double> flux =
      rho.cumulative ? *rho.cumulative : cumulative_integral(rho.ratio, h);
  check_shape(x, flux.size());
  const std::size_t n = flux.size() - 1;
  const double total = flux[n] - flux[0];
  if (std::abs(two_pi * total) > tol * x.volume()) {
    std::ostringstream os;
    os << "poisson_solve: right-hand side integrates to " << two_pi * total;
    throw CompatibilityError(os.str(), two_pi * total);
  }
  // Remove the (tolerated) residual so that the flux vanishes at both poles.
  for (std::size_t j = 0; j <= n; ++j) flux[j] -= flux[0] + total * x.coord(j);
  std::vector<double> du(n + 1);
  du[0] = rho.ratio[0] / x.reduced_density_slope(0);
  du[n] = rho.ratio[n] / x.reduced_density_slope(1);
  for (std::size_t j = 1; j < n; ++j) du[j] = flux[j] / x.reduced_density()[j];
  auto u = cumulative_integral(du, h);
  const double mean = omega_mean(x, u);
  for (auto& v : u) v -= mean;
  return u;
}

Cp1Density metric_of(const Cp1& x, const std::vector<double>& u) {
  Cp1Density out;
  out.ratio = ddbar(x, u);
  const auto du = d_dm(x, u);
  std::vector<double> cum(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    out.ratio[j] += 1.0;
    if (!(out.ratio[j] > 0.0)) {
      std::ostringstream os;
      os << "omega + i ddbar u not positive at m = " << x.coord(j);
      throw PositivityError(os.str(), x.coord(j));
    }
    cum[j] = x.coord(j) + x.reduced_density()[j] * du[j];
  }
  out.cumulative = std::move(cum);
  return out;
}

}  // namespace cp1

Cp1Product Cp1Product::make(int cells, SymplecticPotential w1, SymplecticPotential w2) {
  Cp1Product p;
  p.a_ = Cp1::make(cells, std::move(w1));
  p.b_ = Cp1::make(cells, std::move(w2));
  return p;
}

namespace product {

namespace {

void check_shape(const Cp1Product& x, std::size_t n) {
  if (n != x.nodes()) throw PreconditionError("product field does not match the grid");
}

std::vector<double> row(const std::vector<double>& f, std::size_t side, std::size_t j) {
  return {f.begin() + static_cast<std::ptrdiff_t>(j * side),
          f.begin() + static_cast<std::ptrdiff_t>((j + 1) * side)};
}

std::vector<double> column(const std::vector<double>& f, std::size_t side, std::size_t i) {
  std::vector<double> c(side);
  for (std::size_t j = 0; j < side; ++j) c[j] = f[i + side * j];
  return c;
}

// Apply a 1-D operator to every line of a product field.
template <class Op>
std::vector<double> along_first(const Cp1Product& x, const std::vector<double>& f, Op op) {
  const std::size_t n = x.side();
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < n; ++j) {
    const auto r = op(x.first(), row(f, n, j));
    std::copy(r.begin(), r.end(), out.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
  return out;
}

template <class Op>
std::vector<double> along_second(const Cp1Product& x, const std::vector<double>& f, Op op) {
  const std::size_t n = x.side();
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = op(x.second(), column(f, n, i));
    for (std::size_t j = 0; j < n; ++j) out[i + n * j] = c[j];
  }
  return out;
}

}  // namespace

std::vector<double> split_sum(const Cp1Product& x, const std::vector<double>& f1,
                              const std::vector<double>& f2) {
  const std::size_t n = x.side();
  if (f1.size() != n || f2.size() != n) throw PreconditionError("split_sum: factor size mismatch");
  std::vector<double> out(x.nodes());
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out[i + n * j] = f1[i] + f2[j];
  return out;
}

double integrate(const Cp1Product& x, const std::vector<double>& f) {
  check_shape(x, f.size());
  const std::size_t n = x.side();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      s += x.first().weights()[i] * x.second().weights()[j] * f[i + n * j];
  return two_pi * two_pi * s;
}

double omega_mean(const Cp1Product& x, const std::vector<double>& f) {
  return integrate(x, f) / x.volume();
}

HessianRatios hessian(const Cp1Product& x, const std::vector<double>& u) {
  check_shape(x, u.size());
  HessianRatios h;
  h.a1 = along_first(x, u, [](const Cp1& c, const std::vector<double>& r) { return cp1::ddbar(c, r); });
  h.a2 = along_second(x, u, [](const Cp1& c, const std::vector<double>& r) { return cp1::ddbar(c, r); });
  const auto u1 = along_first(x, u, [](const Cp1& c, const std::vector<double>& r) { return cp1::d_dm(c, r); });
  const auto u12 = along_second(x, u1, [](const Cp1& c, const std::vector<double>& r) { return cp1::d_dm(c, r); });
  const std::size_t n = x.side();
  h.mixed.resize(u.size());
  h.mixed_sq.resize(u.size());
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = i + n * j;
      const double dd = x.first().reduced_density()[i] * x.second().reduced_density()[j];
      h.mixed[k] = std::sqrt(dd) * u12[k];
      h.mixed_sq[k] = dd * u12[k] * u12[k];
    }
  return h;
}

std::vector<double> monge_ampere_ratio(const Cp1Product&, const HessianRatios& h, double s) {
  std::vector<double> out(h.a1.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = (1.0 + s * h.a1[k]) * (1.0 + s * h.a2[k]) - s * s * h.mixed_sq[k];
  return out;
}

std::vector<double> dbar_inner(const Cp1Product& x, const std::vector<double>& f,
                               const std::vector<double>& g, const std::vector<double>& u) {
  check_shape(x, f.size());
  const auto h = hessian(x, u);
  const auto ma = monge_ampere_ratio(x, h);
  auto d1 = [](const Cp1& c, const std::vector<double>& r) { return cp1::d_dm(c, r); };
  const auto f1 = along_first(x, f, d1), f2 = along_second(x, f, d1);
  const auto g1 = along_first(x, g, d1), g2 = along_second(x, g, d1);
  const std::size_t n = x.side();
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = i + n * j;
      const double da = x.first().reduced_density()[i], db = x.second().reduced_density()[j];
      // mixed = sqrt(D1 D2) u_12, so D1 D2 u_12 = sqrt(D1 D2) * mixed.
      const double g12 = std::sqrt(da * db) * h.mixed[k];
      out[k] = (da * f1[k] * g1[k] * (1.0 + h.a2[k]) - g12 * (f1[k] * g2[k] + f2[k] * g1[k]) +
                db * f2[k] * g2[k] * (1.0 + h.a1[k])) /
               ma[k];
    }
  return out;
}

std::vector<double> dbar_norm2(const Cp1Product& x, const std::vector<double>& f,
                               const std::vector<double>& u) {
  return dbar_inner(x, f, f, u);
}

}  // namespace product
}  // namespace kahler
