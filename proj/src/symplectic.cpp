#include "kahler/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kahler {

SymplecticPotential::SymplecticPotential(Polynomial smooth_part)
    : p_(std::move(smooth_part)), dp_(p_.derivative()), d2p_(dp_.derivative()) {}

SymplecticPotential SymplecticPotential::plus(const Polynomial& dp) const {
  return SymplecticPotential(p_ + dp);
}

SymplecticPotential SymplecticPotential::interpolate(const SymplecticPotential& w0,
                                                     const SymplecticPotential& w1, double t) {
  return SymplecticPotential(w0.p_ * (1.0 - t) + w1.p_ * t);
}

double SymplecticPotential::value(double m) const {
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  return xlogx(m) + xlogx(1.0 - m) + p_(m);
}

double SymplecticPotential::slope(double m) const {
  return std::log(m) - std::log1p(-m) + dp_(m);
}

Jet2 SymplecticPotential::reduced_density(double m) const {
  // D = N / (1 + N p''),  N = m(1-m).
  const Jet2 x = Jet2::variable(m);
  const Jet2 n = x * (Jet2::constant(1.0) - x);
  const Polynomial d3p = d2p_.derivative();
  const Polynomial d4p = d3p.derivative();
  const Jet2 q{d2p_(m), d3p(m), d4p(m)};
  return n / (Jet2::constant(1.0) + n * q);
}

MomentPoint SymplecticPotential::moment_of(double s) const {
  auto point = [](double sigma) {
    MomentPoint p;
    p.logit = sigma;
    if (sigma >= 0) {
      const double e = std::exp(-sigma);
      p.m = 1.0 / (1.0 + e);
      p.one_minus_m = e / (1.0 + e);
    } else {
      const double e = std::exp(sigma);
      p.m = e / (1.0 + e);
      p.one_minus_m = 1.0 / (1.0 + e);
    }
    return p;
  };
  if (!std::isfinite(s)) {
    MomentPoint p;
    p.logit = s;
    p.m = s > 0 ? 1.0 : 0.0;
    p.one_minus_m = 1.0 - p.m;
    return p;
  }
  // G(sigma) = sigma + p'(m(sigma)) - s is increasing when w is convex.
  auto residual = [&](double sigma) { return sigma + dp_(point(sigma).m) - s; };
  double lo = s - 1.0, hi = s + 1.0;
  while (residual(lo) > 0) lo -= 2.0 * (hi - lo);
  while (residual(hi) < 0) hi += 2.0 * (hi - lo);
  double sigma = std::clamp(s - dp_(point(s).m), lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double g = residual(sigma);
    if (g > 0) hi = sigma; else lo = sigma;
    const MomentPoint p = point(sigma);
    const double dg = 1.0 + d2p_(p.m) * p.m * p.one_minus_m;
    double next = sigma - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - sigma) <= 1e-15 * std::max(1.0, std::abs(sigma))) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return point(sigma);
}

double SymplecticPotential::convexity_margin(int samples) const {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 1; k < samples; ++k) {
    const double m = static_cast<double>(k) / samples;
    worst = std::min(worst, 1.0 + m * (1.0 - m) * d2p_(m));
  }
  return worst;
}

}  // namespace kahler
