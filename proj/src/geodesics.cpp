#include "kahler/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "kahler/conventions.hpp"
#include "kahler/error.hpp"
#include "kahler/parallel.hpp"

namespace kahler {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double infinity = std::numeric_limits<double>::infinity();

double polynomial_integral(const Polynomial& p) {
  double s = 0.0;
  const auto& c = p.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] / static_cast<double>(k + 1);
  return s;
}

int grid_cells(const Manifold& x) {
  return std::visit(overloaded{
                        [](const Torus& t) { return t.size(); },
                        [](const Cp1& c) { return c.cells(); },
                        [](const Cp1Product& p) { return p.first().cells(); },
                    },
                    x);
}

}  // namespace

TimeGrid TimeGrid::uniform(double first, double last, int count) {
  if (count < 1) throw PreconditionError("time grid needs at least one node");
  if (count > 1 && !(last > first)) throw PreconditionError("time grid must be increasing");
  return {first, count > 1 ? (last - first) / (count - 1) : 0.0, count};
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::induced: return "induced";
    case Provenance::toric: return "toric";
    case Provenance::manual: return "manual";
  }
  return "?";
}

const char* to_string(GaugeRecord::Kind k) {
  switch (k) {
    case GaugeRecord::Kind::energy_zero: return "energy-zero";
    case GaugeRecord::Kind::legendre: return "legendre";
    case GaugeRecord::Kind::affine: return "affine";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// GeodesicPath

GeodesicPath::GeodesicPath(Manifold x, std::vector<TimeGrid> grids, Generator gen, GaugeRecord gauge,
                           Provenance origin, double derivative_step, bool discrete_positivity)
    : x_(std::move(x)), grids_(std::move(grids)), gen_(std::move(gen)), gauge_(gauge), origin_(origin),
      ht_(derivative_step), discrete_positivity_(discrete_positivity) {
  if (grids_.empty() || grids_.size() > 2) throw PreconditionError("paths have one or two time parameters");
  if (!(ht_ > 0.0)) throw PreconditionError("derivative step must be positive");
  const int n1 = grids_[0].count;
  const int n2 = grids_.size() == 2 ? grids_[1].count : 1;
  cache_.resize(static_cast<std::size_t>(n1) * n2);
  parallel_for(static_cast<std::ptrdiff_t>(cache_.size()), [&](std::ptrdiff_t k) {
    const int i = static_cast<int>(k % n1), j = static_cast<int>(k / n1);
    cache_[k] = potential(grids_[0].at(i), grids_.size() == 2 ? grids_[1].at(j) : 0.0);
  });
  // Regularity along the sampled path.
  if (discrete_positivity_)
    for (std::size_t k = 0; k < cache_.size(); ++k)
    if (!is_positive(x_, cache_[k])) {
      std::ostringstream os;
      os << "omega_t not positive at sample " << k;
      throw PositivityError(os.str(), static_cast<double>(k));
    }
}

std::vector<double> GeodesicPath::potential(double t1, double t2) const {
  auto u = gen_(t1, t2);
  if (u.size() != node_count(x_)) throw PreconditionError("path generator returned a field of the wrong size");
  return u;
}

const std::vector<double>& GeodesicPath::sample(int i, int j) const {
  const int n1 = grids_[0].count;
  return cache_.at(static_cast<std::size_t>(i) + static_cast<std::size_t>(n1) * j);
}

std::vector<double> GeodesicPath::velocity(double t1, double t2, int axis) const {
  const double h = ht_;
  auto at = [&](double s) { return axis == 0 ? potential(t1 + s, t2) : potential(t1, t2 + s); };
  const auto m2 = at(-2 * h), m1 = at(-h), p1 = at(h), p2 = at(2 * h);
  std::vector<double> out(m2.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = five_point_d1(m2[k], m1[k], p1[k], p2[k], h);
  return out;
}

std::vector<double> GeodesicPath::acceleration(double t1, double t2, int a, int b) const {
  const double h = ht_;
  if (a == b) {
    auto at = [&](double s) { return a == 0 ? potential(t1 + s, t2) : potential(t1, t2 + s); };
    const auto m2 = at(-2 * h), m1 = at(-h), c0 = at(0.0), p1 = at(h), p2 = at(2 * h);
    std::vector<double> out(c0.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = five_point_d2(m2[k], m1[k], c0[k], p1[k], p2[k], h);
    return out;
  }
  // Mixed derivative: centred cross stencils at h and 2h, combined once.
  auto cross = [&](double s) {
    const auto pp = potential(t1 + s, t2 + s), pm = potential(t1 + s, t2 - s);
    const auto mp = potential(t1 - s, t2 + s), mm = potential(t1 - s, t2 - s);
    std::vector<double> out(pp.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * s * s);
    return out;
  };
  const auto d1 = cross(h), d2 = cross(2 * h);
  std::vector<double> out(d1.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (4.0 * d1[k] - d2[k]) / 3.0;
  return out;
}

GeodesicPath GeodesicPath::restrict_line(std::array<double, 2> origin, std::array<double, 2> direction,
                                         TimeGrid s_grid) const {
  if (time_dimension() != 2) throw PreconditionError("line restriction needs a two-parameter path");
  auto gen = gen_;
  return GeodesicPath(
      x_, {s_grid},
      [gen, origin, direction](double s, double) {
        return gen(origin[0] + s * direction[0], origin[1] + s * direction[1]);
      },
      gauge_, origin_, ht_, discrete_positivity_);
}

GeodesicPath GeodesicPath::regauged(double offset, double slope) const {
  auto gen = gen_;
  GaugeRecord g = gauge_;
  g.kind = GaugeRecord::Kind::affine;
  g.offset += offset;
  g.slope += slope;
  return GeodesicPath(
      x_, grids_,
      [gen, offset, slope](double t1, double t2) {
        auto u = gen(t1, t2);
        for (auto& v : u) v += offset + slope * t1;
        return u;
      },
      g, Provenance::manual, ht_, discrete_positivity_);
}

GeodesicPath GeodesicPath::perturbed(std::function<double(double, std::size_t)> f) const {
  auto gen = gen_;
  return GeodesicPath(
      x_, grids_,
      [gen, f](double t1, double t2) {
        auto u = gen(t1, t2);
        for (std::size_t k = 0; k < u.size(); ++k) u[k] += f(t1, k);
        return u;
      },
      gauge_, Provenance::manual, ht_);
}

// ---------------------------------------------------------------------------
// Energy

double aubin_yau_energy(const Manifold& x, const std::vector<double>& u, EnergyRoute route) {
  if (u.size() != node_count(x)) throw PreconditionError("potential does not match the grid");
  // omega + s i ddbar u is a convex combination, so positivity at s = 1 suffices.
  if (!is_positive(x, u)) {
    const auto r = volume_ratio(x, u);
    const auto bad = std::find_if(r.begin(), r.end(), [](double v) { return !(v > 0.0); });
    const double where = bad == r.end() ? 0.0 : static_cast<double>(bad - r.begin());
    throw PositivityError("omega + i ddbar u not positive along the segment", where);
  }
  auto weighted = [&](const std::vector<double>& ratio) {
    std::vector<double> f(u);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] *= ratio[k];
    return integrate_omega(x, f);
  };
  if (route == EnergyRoute::segment_quadrature) {
    // dE(su)/ds = int u (omega + s i ddbar u)^n/n!, a polynomial of degree n in s.
    double e = 0.0;
    for (std::size_t k = 0; k < gl3_nodes.size(); ++k) e += gl3_weights[k] * weighted(volume_ratio(x, u, gl3_nodes[k]));
    return e;
  }
  // E(u) = (1/(n+1)) sum_j int u omega_u^j ^ omega^(n-j) / n!.
  if (dimension(x) == 1) {
    const auto r = volume_ratio(x, u);
    std::vector<double> half(r);
    for (auto& v : half) v = 0.5 * (1.0 + v);
    return weighted(half);
  }
  const auto& p = std::get<Cp1Product>(x);
  const auto h = product::hessian(p, u);
  const auto ma = product::monge_ampere_ratio(p, h);
  std::vector<double> sum(u.size());
  for (std::size_t k = 0; k < sum.size(); ++k)
    sum[k] = (1.0 + (1.0 + 0.5 * (h.a1[k] + h.a2[k])) + ma[k]) / 3.0;
  return weighted(sum);
}

namespace {

// Constant c with E(u + c) = 0.  E(u + c) = E(u) + c W where W is the
// discrete total mass seen by the segment rule.
std::vector<double> energy_gauged(const Manifold& x, std::vector<double> u) {
  double w = 0.0;
  for (std::size_t k = 0; k < gl3_nodes.size(); ++k)
    w += gl3_weights[k] * integrate_omega(x, volume_ratio(x, u, gl3_nodes[k]));
  const double c = -aubin_yau_energy(x, u) / w;
  for (auto& v : u) v += c;
  return u;
}

std::vector<double> cp1_pullback_potential(const Cp1& x, double shift, double tol) {
  const Cp1Density d = flows::pullback_shift(x, shift);
  Cp1Density rho;
  rho.ratio = d.ratio;
  for (auto& v : rho.ratio) v -= 1.0;
  std::vector<double> cum(*d.cumulative);
  for (std::size_t j = 0; j < cum.size(); ++j) cum[j] -= x.coord(j);
  rho.cumulative = std::move(cum);
  return cp1::poisson_solve(x, rho, tol);
}

// Exact relative potential of the shift s -> s + shift and its energy.
std::pair<std::vector<double>, double> cp1_legendre_potential(const Cp1& x, double shift) {
  const auto& w0 = x.potential();
  const SymplecticPotential wt = w0.plus(Polynomial::affine(0.0, -shift));
  std::vector<double> u(x.nodes());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = legendre_relative_potential(w0, wt, x.coord(j));
  return {std::move(u), legendre_energy(w0, wt)};
}

std::vector<double> product_potential(const Cp1Product& x, double s1, double s2, InducedOptions::Route route,
                                      double tol) {
  if (route == InducedOptions::Route::legendre) {
    auto [u1, e1] = cp1_legendre_potential(x.first(), s1);
    auto [u2, e2] = cp1_legendre_potential(x.second(), s2);
    const double e = x.second().volume() * e1 + x.first().volume() * e2;
    auto u = product::split_sum(x, u1, u2);
    for (auto& v : u) v -= e / x.volume();
    return u;
  }
  const auto u1 = cp1_pullback_potential(x.first(), s1, tol);
  const auto u2 = cp1_pullback_potential(x.second(), s2, tol);
  return energy_gauged(Manifold(x), product::split_sum(x, u1, u2));
}

// Pullbacks of positive forms stay positive; asserted on the exact density.
void assert_pullback_positive(const HoloField& v, const Manifold& x, const TimeGrid& grid) {
  for (int i = 0; i < grid.count; ++i) {
    const FlowMap f = flow(v, cplx(grid.at(i), 0.0));
    std::vector<double> density;
    if (const auto* t = std::get_if<Torus>(&x)) density = flows::pullback(f, *t);
    else if (const auto* c = std::get_if<Cp1>(&x)) density = flows::pullback(f, *c).ratio;
    else {
      const auto d = flows::pullback(f, std::get<Cp1Product>(x));
      density = d[0].ratio;
      density.insert(density.end(), d[1].ratio.begin(), d[1].ratio.end());
    }
    // The exact density of a biholomorphic pullback can underflow to zero in
    // double at large |t|; negative or non-finite values are real failures.
    for (double g : density)
      if (!(g >= 0.0) || !std::isfinite(g)) throw PositivityError("pullback density not positive", grid.at(i));
  }
}

}  // namespace

std::vector<double> pullback_potential(const HoloField& v, const Manifold& x, double t, double tol) {
  const FlowMap f = flow(v, cplx(t, 0.0));
  return std::visit(
      overloaded{
          [&](const Torus& tor) -> std::vector<double> {
            if (!std::holds_alternative<TorusTranslation>(v)) throw PreconditionError("torus needs a translation field");
            auto rho = flows::pullback(f, tor);
            for (std::size_t k = 0; k < rho.size(); ++k) rho[k] -= tor.density()[k];
            return torus::poisson_solve(tor, rho, tol);
          },
          [&](const Cp1& c) -> std::vector<double> {
            if (!std::holds_alternative<Cp1Dilation>(v)) throw PreconditionError("cp1 needs a dilation field");
            return cp1_pullback_potential(c, f.log_shift(), tol);
          },
          [&](const Cp1Product& p) -> std::vector<double> {
            if (!std::holds_alternative<ProductDilation>(v)) throw PreconditionError("product needs a tuple field");
            return product::split_sum(p, cp1_pullback_potential(p.first(), f.log_shift(0), tol),
                                      cp1_pullback_potential(p.second(), f.log_shift(1), tol));
          },
      },
      x);
}

GeodesicPath induced_geodesic(const HoloField& v, const Manifold& x, TimeGrid grid, const InducedOptions& opt) {
  const double ht = opt.derivative_step.value_or(4.0 / grid_cells(x));
  const double tol = opt.tol;
  GeodesicPath::Generator gen;
  if (const auto* tor = std::get_if<Torus>(&x)) {
    const auto* tv = std::get_if<TorusTranslation>(&v);
    if (!tv) throw PreconditionError("torus needs a translation field");
    if (opt.route == InducedOptions::Route::legendre) throw PreconditionError("the legendre route needs a cp1 backend");
    const auto e = flows::exactness_check(*tv, *tor, tor->density());
    if (!e.exact && !opt.override_exactness) {
      std::ostringstream os;
      os << "V -| omega is not dbar-exact (obstruction " << e.obstruction << "); no induced geodesic";
      throw ObstructionError(os.str(), e.obstruction);
    }
    gen = [v, x, tol](double t, double) { return energy_gauged(x, pullback_potential(v, x, t, tol)); };
  } else if (const auto* c = std::get_if<Cp1>(&x)) {
    const auto* cv = std::get_if<Cp1Dilation>(&v);
    if (!cv) throw PreconditionError("cp1 needs a dilation field");
    const Cp1 cx = *c;
    const cplx a = cv->a;
    if (opt.route == InducedOptions::Route::legendre) {
      gen = [cx, a](double t, double) {
        auto [u, e] = cp1_legendre_potential(cx, 2.0 * (a * t).real());
        for (auto& val : u) val -= e / cx.volume();
        return u;
      };
    } else {
      gen = [v, x, tol](double t, double) { return energy_gauged(x, pullback_potential(v, x, t, tol)); };
    }
  } else {
    const auto& p = std::get<Cp1Product>(x);
    const auto* pv = std::get_if<ProductDilation>(&v);
    if (!pv) throw PreconditionError("product needs a tuple field");
    const ProductDilation d = *pv;
    const auto route = opt.route;
    gen = [p, d, route, tol](double t, double) {
      return product_potential(p, 2.0 * (d.a1 * t).real(), 2.0 * (d.a2 * t).real(), route, tol);
    };
  }
  assert_pullback_positive(v, x, grid);
  return GeodesicPath(x, {grid}, std::move(gen), GaugeRecord{}, Provenance::induced, ht, false);
}

GeodesicPath multi_geodesic(const ProductDilation& v, const Cp1Product& x, TimeGrid g1, TimeGrid g2,
                            const InducedOptions& opt) {
  const double ht = opt.derivative_step.value_or(4.0 / x.first().cells());
  const auto route = opt.route;
  const double tol = opt.tol;
  auto gen = [x, v, route, tol](double t1, double t2) {
    return product_potential(x, 2.0 * (v.a1 * t1).real(), 2.0 * (v.a2 * t2).real(), route, tol);
  };
  for (const auto& [g, factor] : {std::pair{g1, 0}, std::pair{g2, 1}}) {
    const cplx a = factor == 0 ? v.a1 : v.a2;
    assert_pullback_positive(Cp1Dilation{a}, Manifold(factor == 0 ? x.first() : x.second()), g);
  }
  return GeodesicPath(Manifold(x), {g1, g2}, std::move(gen), GaugeRecord{}, Provenance::induced, ht, false);
}

// ---------------------------------------------------------------------------
// Toric paths

double legendre_relative_potential(const SymplecticPotential& w0, const SymplecticPotential& wt, double m) {
  const Polynomial& p0 = w0.smooth_part();
  const Polynomial& pt = wt.smooth_part();
  if (m <= 0.0) return -(pt(0.0) - p0(0.0));
  if (m >= 1.0) return -(pt(1.0) - p0(1.0));
  const Polynomial dp0 = p0.derivative(), dpt = pt.derivative();
  const MomentPoint mu = wt.moment_of(w0.slope(m));
  // s mu - w_t(mu) - (s m - w_0(m)) with s = w_0'(m), written without the
  // cancelling logarithms.  Near m = 1 the complementary form subtracts s.
  if (m <= 0.5) {
    const double at_t = mu.m * dpt(mu.m) - std::log(mu.one_minus_m) - pt(mu.m);
    const double at_0 = m * dp0(m) - std::log1p(-m) - p0(m);
    return at_t - at_0;
  }
  const double at_t = -mu.one_minus_m * dpt(mu.m) - std::log(mu.m) - pt(mu.m);
  const double at_0 = -(1.0 - m) * dp0(m) - std::log(m) - p0(m);
  return at_t - at_0;
}

double legendre_energy(const SymplecticPotential& w0, const SymplecticPotential& wt) {
  return -two_pi * polynomial_integral(wt.smooth_part() + w0.smooth_part() * -1.0);
}

GeodesicPath toric_geodesic(const Cp1& x0, const SymplecticPotential& w1, TimeGrid grid,
                            std::optional<double> derivative_step) {
  const SymplecticPotential w0 = x0.potential();
  for (int i = 0; i < grid.count; ++i) {
    const double t = grid.at(i);
    if (!(SymplecticPotential::interpolate(w0, w1, t).convexity_margin() > 0.0)) {
      std::ostringstream os;
      os << "toric path loses convexity at t = " << t;
      throw PositivityError(os.str(), t);
    }
  }
  auto gen = [x0, w0, w1](double t, double) {
    const SymplecticPotential wt = SymplecticPotential::interpolate(w0, w1, t);
    std::vector<double> u(x0.nodes());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = legendre_relative_potential(w0, wt, x0.coord(j));
    return u;
  };
  GaugeRecord g;
  g.kind = GaugeRecord::Kind::legendre;
  return GeodesicPath(Manifold(x0), {grid}, std::move(gen), g, Provenance::toric,
                      derivative_step.value_or(4.0 / x0.cells()));
}

std::vector<double> toric_velocity(const Cp1& x0, const SymplecticPotential& w1, double t) {
  const auto& w0 = x0.potential();
  const Polynomial delta = w1.smooth_part() + w0.smooth_part() * -1.0;
  const SymplecticPotential wt = SymplecticPotential::interpolate(w0, w1, t);
  std::vector<double> v(x0.nodes());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double m = x0.coord(j);
    const double mu = (j == 0 || j + 1 == v.size()) ? m : wt.moment_of(w0.slope(m)).m;
    v[j] = -delta(mu);
  }
  return v;
}

ExtensionTime max_extension_time(const SymplecticPotential& w0, const Polynomial& dw) {
  ExtensionTime out{infinity, infinity};
  const Polynomial d2 = dw.derivative().derivative();
  if (dw.nonaffine_size() <= 1e-14) return out;
  const Polynomial d2p = w0.smooth_part().derivative().derivative();
  auto w2 = [&](double m) { return 1.0 / (m * (1.0 - m)) + d2p(m); };
  // Breakdown time at m: w0'' / |dw''| where dw'' has the opposite sign of t.
  auto ratio = [&](double m, double sign) {
    const double q = sign * d2(m);
    return q < 0.0 ? w2(m) / -q : infinity;
  };
  const int samples = 1 << 14;
  for (double sign : {1.0, -1.0}) {
    double best = infinity;
    int at = -1;
    for (int k = 1; k < samples; ++k) {
      const double r = ratio(static_cast<double>(k) / samples, sign);
      if (r < best) best = r, at = k;
    }
    if (at > 0) {
      // Golden-section refinement on the bracketing cells.
      double lo = static_cast<double>(at - 1) / samples, hi = static_cast<double>(at + 1) / samples;
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 100; ++it) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (ratio(a, sign) < ratio(b, sign)) hi = b; else lo = a;
      }
      best = std::min(best, ratio(0.5 * (lo + hi), sign));
    }
    (sign > 0 ? out.forward : out.backward) = best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residuals

namespace {

void require_interior(const GeodesicPath& path, double t) {
  const TimeGrid& g = path.grid();
  const double slack = 1e-12 * std::max(1.0, std::abs(g.last() - g.start));
  if (!(t > g.start + slack && t < g.last() - slack)) {
    std::ostringstream os;
    os << "t = " << t << " is not an interior time of [" << g.start << ", " << g.last() << "]";
    throw PreconditionError(os.str());
  }
}

double omega_t_mean(const Manifold& x, const std::vector<double>& f, const std::vector<double>& ratio) {
  std::vector<double> fr(f);
  for (std::size_t k = 0; k < fr.size(); ++k) fr[k] *= ratio[k];
  return integrate_omega(x, fr) / integrate_omega(x, ratio);
}

double sup_abs_dev(const std::vector<double>& f, double c) {
  double s = 0.0;
  for (double v : f) s = std::max(s, std::abs(v - c));
  return s;
}

}  // namespace

Residual geodesic_residual(const GeodesicPath& path, double t) {
  if (path.time_dimension() != 1) throw PreconditionError("geodesic residual needs a one-parameter path");
  require_interior(path, t);
  const Manifold& x = path.manifold();
  const auto u = path.potential(t);
  const auto ud = path.velocity(t);
  const auto udd = path.acceleration(t);
  const auto g = dbar_inner(x, ud, ud, u);
  Residual r;
  r.c.resize(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) r.c[k] = 0.25 * (udd[k] - g[k]);
  r.mean = omega_t_mean(x, r.c, volume_ratio(x, u));
  r.deviation = sup_abs_dev(r.c, r.mean);
  return r;
}

double hcmae_residual(const GeodesicPath& path, double t) {
  if (path.time_dimension() != 1) throw PreconditionError("HCMAE residual needs a one-parameter path");
  require_interior(path, t);
  const Manifold& x = path.manifold();
  const auto u = path.potential(t);
  const auto ud = path.velocity(t);
  const auto udd = path.acceleration(t);
  const auto ratio = volume_ratio(x, u);
  // Determinant of the (n+1)x(n+1) complex Hessian of u + reference on the
  // (tau, x) space, divided by the reference volume form.
  std::vector<double> det(u.size());
  std::visit(overloaded{
                 [&](const Torus& tor) {
                   const auto b = torus::dbar(tor, ud);
                   const auto a = torus::ddbar(tor, u);
                   for (std::size_t k = 0; k < det.size(); ++k) {
                     const double gt = tor.density()[k] + a[k];
                     det[k] = (0.25 * udd[k] * gt - 0.25 * std::norm(b[k])) / tor.density()[k];
                   }
                 },
                 [&](const Cp1& c) {
                   const auto du = cp1::d_dm(c, ud);
                   for (std::size_t k = 0; k < det.size(); ++k)
                     det[k] = 0.25 * (udd[k] * ratio[k] - c.reduced_density()[k] * du[k] * du[k]);
                 },
                 [&](const Cp1Product& p) {
                   // Schur complement of the 2x2 spatial block.
                   const auto g = product::dbar_norm2(p, ud, u);
                   for (std::size_t k = 0; k < det.size(); ++k) det[k] = 0.25 * ratio[k] * (udd[k] - g[k]);
                 },
             },
             x);
  const double gauge = integrate_omega(x, det) / integrate_omega(x, ratio);
  double s = 0.0;
  for (std::size_t k = 0; k < det.size(); ++k) s = std::max(s, std::abs(det[k] - gauge * ratio[k]));
  return s;
}

double multi_geodesic_system_residual(const GeodesicPath& path, double t1, double t2) {
  if (path.time_dimension() != 2) throw PreconditionError("system residual needs a two-parameter path");
  const Manifold& x = path.manifold();
  const auto u = path.potential(t1, t2);
  const auto ratio = volume_ratio(x, u);
  const std::array<std::vector<double>, 2> ud = {path.velocity(t1, t2, 0), path.velocity(t1, t2, 1)};
  double worst = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) {
      const auto udd = path.acceleration(t1, t2, a, b);
      const auto g = dbar_inner(x, ud[a], ud[b], u);
      std::vector<double> r(u.size());
      for (std::size_t k = 0; k < r.size(); ++k) r[k] = udd[k] - g[k];
      worst = std::max(worst, sup_abs_dev(r, omega_t_mean(x, r, ratio)));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Asymptotics

AsymptoticReport asymptotic_slope(const GeodesicPath& path, double big_t, const std::vector<double>& t_sample,
                                  double eps_velocity, double eps_slope) {
  if (path.time_dimension() != 1) throw PreconditionError("asymptotic slope needs a one-parameter path");
  if (!(big_t > 0.0)) throw PreconditionError("asymptotic time must be positive");
  const Manifold& x = path.manifold();
  AsymptoticReport r;
  r.time = big_t;
  r.velocity = path.velocity(big_t);
  const auto u = path.potential(big_t);
  r.slope.resize(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) r.slope[k] = u[k] / big_t;
  r.limit = *std::max_element(r.velocity.begin(), r.velocity.end());
  const auto q = node_weights(x);
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (std::abs(r.velocity[k] - r.limit) > eps_velocity) r.velocity_deviation_measure += q[k];
    if (std::abs(r.slope[k] - r.limit) > eps_slope) r.slope_deviation_measure += q[k];
  }
  r.sup_norms.resize(t_sample.size());
  parallel_for(static_cast<std::ptrdiff_t>(t_sample.size()), [&](std::ptrdiff_t i) {
    const auto v = path.velocity(t_sample[i]);
    double s = 0.0;
    for (double val : v) s = std::max(s, std::abs(val));
    r.sup_norms[i] = s;
  });
  if (!r.sup_norms.empty()) {
    const auto [lo, hi] = std::minmax_element(r.sup_norms.begin(), r.sup_norms.end());
    r.sup_norm_spread = *hi - *lo;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

void write_path_bundle(const GeodesicPath& path, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Manifold& x = path.manifold();
  const char* backend = std::visit(overloaded{
                                       [](const Torus&) { return "torus"; },
                                       [](const Cp1&) { return "cp1"; },
                                       [](const Cp1Product&) { return "product"; },
                                   },
                                   x);
  nlohmann::json manifest;
  manifest["backend"] = backend;
  manifest["nodes"] = node_count(x);
  manifest["volume"] = volume(x);
  manifest["provenance"] = to_string(path.origin());
  manifest["gauge"] = {{"kind", to_string(path.gauge().kind)},
                       {"offset", path.gauge().offset},
                       {"slope", path.gauge().slope}};
  manifest["derivative"] = {{"step", path.derivative_step()}, {"method", path.derivative_method()}};
  for (const auto& g : path.grids())
    manifest["time_grids"].push_back({{"start", g.start}, {"step", g.step}, {"count", g.count}});
  const int n1 = path.grids()[0].count;
  const int n2 = path.time_dimension() == 2 ? path.grids()[1].count : 1;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const double t1 = path.grids()[0].at(i);
      const double t2 = path.time_dimension() == 2 ? path.grids()[1].at(j) : 0.0;
      std::ostringstream name;
      name << "t_" << std::setw(4) << std::setfill('0') << i;
      if (path.time_dimension() == 2) name << "_" << std::setw(4) << std::setfill('0') << j;
      name << ".csv";
      std::ofstream out(dir / name.str());
      out << std::setprecision(17);
      out << "x1,x2,u,u_dot1" << (path.time_dimension() == 2 ? ",u_dot2" : "") << "\n";
      const auto& u = path.sample(i, j);
      const auto v1 = path.velocity(t1, t2, 0);
      const auto v2 = path.time_dimension() == 2 ? path.velocity(t1, t2, 1) : std::vector<double>{};
      for (std::size_t k = 0; k < u.size(); ++k) {
        const auto c = node_coord(x, k);
        out << c[0] << "," << c[1] << "," << u[k] << "," << v1[k];
        if (!v2.empty()) out << "," << v2[k];
        out << "\n";
      }
      manifest["files"].push_back({{"file", name.str()}, {"t", {t1, t2}}});
    }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

}  // namespace kahler
