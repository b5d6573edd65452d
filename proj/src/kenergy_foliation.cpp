#include "kahler/kenergy_foliation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kahler/conventions.hpp"
#include "kahler/error.hpp"
#include "kahler/parallel.hpp"

namespace kahler {

namespace {

const Cp1& cp1_of(const GeodesicPath& path) {
  if (path.time_dimension() != 1) throw PreconditionError("leaves are traced on one-parameter paths");
  const auto* x = std::get_if<Cp1>(&path.manifold());
  if (!x) throw PreconditionError("the foliation tools work on the cp1 backend");
  return *x;
}

std::vector<double> ratio_of(const Cp1& x, const std::vector<double>& u) {
  auto r = cp1::ddbar(x, u);
  for (std::size_t j = 0; j < r.size(); ++j) {
    r[j] += 1.0;
    if (!(r[j] > 0.0)) throw PositivityError("omega_t degenerate on the leaf strip", static_cast<double>(j));
  }
  return r;
}

int zero_node(const TimeGrid& g) {
  const double k = -g.start / g.step;
  const int i = static_cast<int>(std::lround(k));
  if (i < 0 || i >= g.count || std::abs(k - i) > 1e-9) throw PreconditionError("the strip grid must contain t = 0");
  return i;
}

// Starts y_l with omega_0-mass fraction (l + 1/2)/N below them: G_0(y_l) = (l + 1/2)/N.
std::vector<double> stratified_starts(const Cp1& x, const std::vector<double>& u0, int count) {
  if (count < 1) throw PreconditionError("leaf sample is empty");
  auto g = cp1::dbar(x, u0);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] += x.coord(j);
  std::vector<double> starts(count);
  for (int l = 0; l < count; ++l) {
    const double target = (l + 0.5) / count;
    const auto it = std::lower_bound(g.begin(), g.end(), target);
    const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - g.begin()), 1, g.size() - 1);
    const double f = (target - g[j - 1]) / (g[j] - g[j - 1]);
    starts[l] = x.coord(j - 1) + f * x.spacing();
  }
  return starts;
}

double checked(double y) {
  if (!(y > 0.0 && y < 1.0)) {
    std::ostringstream os;
    os << "leaf left the resolvable region (y = " << y << ")";
    throw PreconditionError(os.str());
  }
  return y;
}

}  // namespace

std::vector<double> leaf_field(const GeodesicPath& path, double t) {
  const Cp1& x = cp1_of(path);
  const auto r = ratio_of(x, path.potential(t));
  const auto dv = cp1::d_dm(x, path.velocity(t));
  std::vector<double> eta(r.size());
  for (std::size_t j = 0; j < eta.size(); ++j) eta[j] = dv[j] / (2.0 * r[j]);
  return eta;
}

// ---------------------------------------------------------------------------
// Leaves

LeafSolver::LeafSolver(const GeodesicPath& path, TimeGrid strip) : path_(&path), x_(cp1_of(path)), strip_(strip) {
  if (strip.count < 2) throw PreconditionError("strip grid needs two nodes");
  origin_ = zero_node(strip);
  const int fine = 4 * (strip.count - 1) + 1;
  drift_.resize(fine);
  ratio_.resize(fine);
  dbar_velocity_.resize(fine);
  parallel_for(fine, [&](std::ptrdiff_t k) {
    const double t = strip.start + 0.25 * strip.step * static_cast<double>(k);
    ratio_[k] = ratio_of(x_, path.potential(t));
    dbar_velocity_[k] = cp1::dbar(x_, path.velocity(t));
    drift_[k].resize(ratio_[k].size());
    for (std::size_t j = 0; j < drift_[k].size(); ++j) drift_[k][j] = -dbar_velocity_[k][j] / ratio_[k][j];
  });
}

double LeafSolver::drift(int fine, double y) const { return interpolate_cubic(drift_[fine], x_.spacing(), y); }
double LeafSolver::ratio(int fine, double y) const { return interpolate_cubic(ratio_[fine], x_.spacing(), y); }

LeafTrajectory LeafSolver::trace(double start) const {
  checked(start);
  LeafTrajectory leaf;
  leaf.start = start;
  leaf.times = strip_;
  leaf.position.assign(strip_.count, 0.0);
  leaf.position[origin_] = start;
  const double h = 0.5 * strip_.step;
  // One RK4 step of size dir*h from fine index k (stages at k, k + dir, k + 2 dir).
  auto rk4 = [&](int k, int dir, double y) {
    const double s = dir * h;
    const double k1 = drift(k, y);
    const double k2 = drift(k + dir, checked(y + 0.5 * s * k1));
    const double k3 = drift(k + dir, checked(y + 0.5 * s * k2));
    const double k4 = drift(k + 2 * dir, checked(y + s * k3));
    return checked(y + s * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
  };
  for (int dir : {1, -1}) {
    double y = start;
    for (int i = origin_; dir > 0 ? i + 1 < strip_.count : i > 0; i += dir) {
      const int k = fine_index(i);
      y = rk4(k, dir, y);
      y = rk4(k + 2 * dir, dir, y);
      leaf.position[i + dir] = y;
    }
  }
  leaf.ratio.resize(strip_.count);
  leaf.log_density.resize(strip_.count);
  leaf.log_density_far.resize(strip_.count);
  const auto& w = x_.potential();
  for (int i = 0; i < strip_.count; ++i) {
    const double y = leaf.position[i];
    const double r = ratio(fine_index(i), y);
    // omega_t = D R ds dtheta at the leaf point, and dx dy = |z|^2 ds dtheta / 2.
    const double log_dr = std::log(w.reduced_density(y).v * r);
    leaf.ratio[i] = r;
    leaf.log_density[i] = log_dr - w.slope(y);
    leaf.log_density_far[i] = log_dr + w.slope(y);
  }
  return leaf;
}

std::vector<LeafTrajectory> LeafSolver::trace(const std::vector<double>& starts) const {
  std::vector<LeafTrajectory> out(starts.size());
  parallel_for(static_cast<std::ptrdiff_t>(starts.size()), [&](std::ptrdiff_t l) { out[l] = trace(starts[l]); });
  return out;
}

LeafTrajectory trace_leaf(const GeodesicPath& path, double start, TimeGrid strip) {
  return LeafSolver(path, strip).trace(start);
}

double leaf_pullback_check(const LeafSolver& solver, double start, double delta) {
  if (!(delta > 0.0) || start - delta <= 0.0 || start + delta >= 1.0)
    throw PreconditionError("insufficient neighbours for the leaf Jacobian");
  const auto leaves = solver.trace({start - delta, start, start + delta});
  const auto& s = solver.strip();
  const double reference = leaves[1].ratio[zero_node(s)];
  double err = 0.0;
  for (int i = 0; i < s.count; ++i) {
    const double jac = (leaves[2].position[i] - leaves[0].position[i]) / (2.0 * delta);
    err = std::max(err, std::abs(leaves[1].ratio[i] * jac - reference));
  }
  return err;
}

double leaf_holomorphicity_defect(const LeafSolver& solver, double start) {
  const auto leaf = solver.trace(start);
  const auto& w = solver.manifold().potential();
  auto eta = [&](int i) {
    const double y = leaf.position[i];
    return -solver.drift(solver.fine_index(i), y) / (2.0 * w.reduced_density(y).v);
  };
  const double e0 = eta(zero_node(solver.strip()));
  double d = 0.0;
  for (int i = 0; i < solver.strip().count; ++i) d = std::max(d, std::abs(eta(i) - e0));
  return d;
}

double leaf_pullback_check(const GeodesicPath& path, double start, TimeGrid strip) {
  const LeafSolver solver(path, strip);
  return leaf_pullback_check(solver, start, solver.manifold().spacing());
}

// ---------------------------------------------------------------------------
// theta

LeafTheta theta_on_leaf(const LeafTrajectory& leaf, double kappa_floor, bool far_chart) {
  const int n = leaf.times.count;
  if (n < 5) throw PreconditionError("theta needs at least five leaf nodes");
  const double dt = leaf.times.step;
  const auto& l = far_chart ? leaf.log_density_far : leaf.log_density;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  LeafTheta th;
  th.times.resize(n);
  for (int i = 0; i < n; ++i) th.times[i] = leaf.times.at(i);
  th.kappa.assign(n, nan);
  th.kappa_richardson.assign(n, nan);
  th.curvature.assign(n, nan);
  th.curvature_richardson.assign(n, nan);
  for (int i = 2; i + 2 < n; ++i) {
    th.kappa[i] = 0.25 * five_point_d2(l[i - 2], l[i - 1], l[i], l[i + 1], l[i + 2], dt);
    th.kappa_sup = std::max(th.kappa_sup, std::abs(th.kappa[i]));
  }
  for (int i = 4; i + 4 < n; ++i) {
    const double wide = 0.25 * five_point_d2(l[i - 4], l[i - 2], l[i], l[i + 2], l[i + 4], 2.0 * dt);
    th.kappa_richardson[i] = (16.0 * th.kappa[i] - wide) / 15.0;
  }
  auto curvature = [&](const std::vector<double>& k, int i) {
    for (int q = -2; q <= 2; ++q)
      if (!(k[i + q] > kappa_floor)) return nan;
    const double d2 = five_point_d2(std::log(k[i - 2]), std::log(k[i - 1]), std::log(k[i]), std::log(k[i + 1]),
                                    std::log(k[i + 2]), dt);
    return -0.25 * d2 / k[i];
  };
  for (int i = 4; i + 4 < n; ++i) {
    th.curvature[i] = curvature(th.kappa, i);
    if (std::isfinite(th.curvature[i])) th.curvature_max = std::max(th.curvature_max, th.curvature[i]);
  }
  for (int i = 6; i + 6 < n; ++i) th.curvature_richardson[i] = curvature(th.kappa_richardson, i);
  return th;
}

double burns_margin(const LeafTheta& theta, int n) { return -2.0 / n - theta.curvature_max; }

// ---------------------------------------------------------------------------
// K-energy

double mabuchi_derivative(const GeodesicPath& path, double t) {
  const Cp1& x = cp1_of(path);
  const auto r = ratio_of(x, path.potential(t));
  const auto v = path.velocity(t);
  std::vector<double> dr(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) dr[j] = x.reduced_density()[j] * r[j];
  auto q = cp1::d_dm(x, dr);
  for (std::size_t j = 0; j < q.size(); ++j) q[j] /= r[j];
  const auto dv = cp1::d_dm(x, v);
  // S_t omega_t = -2 pi q' dm with q = (D R)'/R; integrate u-dot q' by parts.
  double i1 = 0.0, i2 = 0.0;
  const auto& w = x.weights();
  for (std::size_t j = 0; j < v.size(); ++j) {
    i1 += w[j] * dv[j] * q[j];
    i2 += w[j] * v[j] * r[j];
  }
  const std::size_t n = v.size() - 1;
  const double scalar_mean = 2.0;  // 4 pi chi(CP^1) / (2 V) with V = 2 pi
  return -two_pi * (-v[n] * q[n] + v[0] * q[0] + i1 - scalar_mean * i2);
}

ThetaDensity kenergy_theta(const GeodesicPath& path, const ThetaOptions& opt) {
  const Cp1& x = cp1_of(path);
  if (!(opt.step > 0.0) || !(opt.t_hi >= opt.t_lo)) throw PreconditionError("empty theta window");
  const double dt = opt.step;
  int lo = static_cast<int>(std::floor(opt.t_lo / dt + 1e-9)), hi = static_cast<int>(std::ceil(opt.t_hi / dt - 1e-9));
  const int first = std::min(lo - 2, 0), last = std::max(hi + 2, 0);
  const TimeGrid strip{first * dt, dt, last - first + 1};
  const LeafSolver solver(path, strip);
  const auto starts = stratified_starts(x, path.potential(0.0), opt.leaves);
  const auto leaves = solver.trace(starts);

  ThetaDensity th;
  th.times = TimeGrid{lo * dt, dt, hi - lo + 1};
  th.leaves = opt.leaves;
  th.kappa.assign(th.times.count, 0.0);
  const double mass = x.volume() / opt.leaves;
  for (const auto& leaf : leaves) {
    const auto& l = leaf.log_density;
    for (int i = 0; i < th.times.count; ++i) {
      const int s = i + lo - first;
      th.kappa[i] += mass * 0.25 * five_point_d2(l[s - 2], l[s - 1], l[s], l[s + 1], l[s + 2], dt);
    }
  }
  std::vector<double> kprime(strip.count);
  parallel_for(strip.count, [&](std::ptrdiff_t i) { kprime[i] = mabuchi_derivative(path, strip.at(static_cast<int>(i))); });
  th.kappa_direct.resize(th.times.count);
  for (int i = 0; i < th.times.count; ++i) {
    const int s = i + lo - first;
    th.kappa_direct[i] = 0.25 * five_point_d1(kprime[s - 2], kprime[s - 1], kprime[s + 1], kprime[s + 2], dt);
    th.discrepancy = std::max(th.discrepancy, std::abs(th.kappa[i] - th.kappa_direct[i]));
  }
  return th;
}

// ---------------------------------------------------------------------------
// Superposition

SuperpositionCheck superposition_check(const GeodesicPath& path, const std::function<double(double, double)>& psi,
                                       TimeGrid strip, int leaves) {
  const Cp1& x = cp1_of(path);
  if (strip.count < 9) throw PreconditionError("superposition check needs nine strip nodes");
  const double e = 1e-3;
  auto d_t = [&](double t, double m) { return five_point_d1(psi(t - 2 * e, m), psi(t - e, m), psi(t + e, m), psi(t + 2 * e, m), e); };
  auto d_m = [&](double t, double m) { return five_point_d1(psi(t, m - 2 * e), psi(t, m - e), psi(t, m + e), psi(t, m + 2 * e), e); };
  auto d_mm = [&](double t, double m) {
    return five_point_d2(psi(t, m - 2 * e), psi(t, m - e), psi(t, m), psi(t, m + e), psi(t, m + 2 * e), e);
  };
  auto d_tt = [&](double t, double m) {
    return five_point_d2(psi(t - 2 * e, m), psi(t - e, m), psi(t, m), psi(t + e, m), psi(t + 2 * e, m), e);
  };
  auto d_tm = [&](double t, double m) {
    return five_point_d1(d_m(t - 2 * e, m), d_m(t - e, m), d_m(t + e, m), d_m(t + 2 * e, m), e);
  };

  // The (t, s) Hessians of Phi = phi + u and psi wedge to
  // pi int dt int dm [u_tt (D psi')' + R psi_tt - 2 D u-dot' psi_t'] per unit Im tau.
  std::vector<double> slice(strip.count);
  parallel_for(strip.count, [&](std::ptrdiff_t i) {
    const double t = strip.at(static_cast<int>(i));
    const auto r = ratio_of(x, path.potential(t));
    const auto f = cp1::dbar(x, path.velocity(t));
    const auto a = path.acceleration(t);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double m = x.coord(j);
      const Jet2 d = x.potential().reduced_density(m);
      s += x.weights()[j] * (a[j] * (d.d1 * d_m(t, m) + d.v * d_mm(t, m)) + r[j] * d_tt(t, m) - 2.0 * f[j] * d_tm(t, m));
    }
    slice[i] = s;
  });
  const auto wt = sbp_weights(strip.count - 1, strip.step);
  SuperpositionCheck out;
  for (int i = 0; i < strip.count; ++i) out.lhs += pi * wt[i] * slice[i];

  // Leaf side: int_{Y_x} i ddbar psi = (1/2) [d/dt psi(t, y(t))] over the strip.
  const LeafSolver solver(path, strip);
  const auto traced = solver.trace(stratified_starts(x, path.potential(0.0), leaves));
  const int last = strip.count - 1;
  for (const auto& leaf : traced) {
    auto rate = [&](int i) {
      const double t = strip.at(i), y = leaf.position[i];
      return d_t(t, y) + d_m(t, y) * solver.drift(solver.fine_index(i), y);
    };
    out.rhs += pi / leaves * (rate(last) - rate(0));
  }
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

// ---------------------------------------------------------------------------
// Curvature bounds

double Strip::density(double t) const {
  const double s = std::sin(pi * (t - a) / length);
  return (pi / length) * (pi / length) / (2.0 * s * s);
}

CurvatureBoundReport curvature_bound_check(const TimeGrid& times, const std::vector<double>& kappa, double volume,
                                           int n, std::optional<Strip> strip, double kappa_floor) {
  if (times.count < 5 || static_cast<int>(kappa.size()) != times.count)
    throw PreconditionError("curvature window needs five kappa samples");
  CurvatureBoundReport rep;
  rep.constant_differential = 2.0 / (n * volume);
  rep.constant_strip = 0.5 * n * volume;
  rep.times.resize(times.count);
  for (int i = 0; i < times.count; ++i) rep.times[i] = times.at(i);
  double sup = 0.0;
  for (double k : kappa) sup = std::max(sup, std::abs(k));
  rep.identically_zero = sup <= kappa_floor;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.margin.assign(times.count, nan);
  if (!rep.identically_zero) {
    for (int i = 2; i + 2 < times.count; ++i) {
      bool ok = true;
      for (int q = -2; q <= 2; ++q) ok = ok && kappa[i + q] > kappa_floor;
      if (!ok) continue;
      const double d2 = five_point_d2(std::log(kappa[i - 2]), std::log(kappa[i - 1]), std::log(kappa[i]),
                                      std::log(kappa[i + 1]), std::log(kappa[i + 2]), times.step);
      rep.margin[i] = 0.25 * d2 - rep.constant_differential * kappa[i];
      rep.min_margin = std::min(rep.min_margin, rep.margin[i]);
    }
  }
  if (strip) {
    rep.strip_excess.resize(times.count);
    for (int i = 0; i < times.count; ++i) {
      const double t = times.at(i);
      if (!(t > strip->a && t < strip->a + strip->length)) throw PreconditionError("kappa sample outside the strip");
      rep.strip_excess[i] = kappa[i] - rep.constant_strip * strip->density(t);
      rep.max_strip_excess = std::max(rep.max_strip_excess, rep.strip_excess[i]);
    }
  }
  return rep;
}

}  // namespace kahler
