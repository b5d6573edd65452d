#include <cmath>

#include "doctest.h"
#include "kahler/conventions.hpp"
#include "kahler/error.hpp"
#include "kahler/kenergy_foliation.hpp"

using namespace kahler;

namespace {

Cp1 fs(int m) { return Cp1::make(m, SymplecticPotential::fubini_study()); }

GeodesicPath induced(int m) {
  return induced_geodesic(Cp1Dilation{}, Manifold(fs(m)), TimeGrid::uniform(-1, 1, 5));
}
GeodesicPath toric(int m, double amp = 1.0) {
  const auto x = fs(m);
  return toric_geodesic(x, x.potential().plus(Polynomial::bump() * amp), TimeGrid::uniform(0, 1, 5));
}
GeodesicPath constant(int m) {
  const auto x = fs(m);
  return toric_geodesic(x, x.potential(), TimeGrid::uniform(0, 1, 5));
}

double order(const std::vector<double>& err, const std::vector<double>& res) {
  return convergence_order(res, err).slope;
}

// Closed-form toric data for w_t = w0 + t bump: leaves keep the moment mu, and
// K'' = 2 pi int (bump''/w_t'')^2 dmu, so kappa = (pi/2) int (bump''/w_t'')^2 dmu.
double toric_kappa_oracle(double t) {
  const auto d2b = Polynomial::bump().derivative().derivative();
  const int n = 20000;
  double s = 0.0;
  for (int k = 1; k < n; ++k) {
    const double mu = double(k) / n;
    const double w2 = 1.0 / (mu * (1 - mu)) + t * d2b(mu);
    s += (k % 2 ? 4.0 : 2.0) * std::pow(d2b(mu) / w2, 2);
  }
  return 0.5 * pi * s / (3.0 * n);
}

}  // namespace

TEST_CASE("leaf field of an induced path is the generating field") {
  std::vector<double> err, res;
  for (int m : {64, 128, 256}) {
    const auto eta = leaf_field(induced(m), 0.3);
    double e = 0.0;
    for (double v : eta) e = std::max(e, std::abs(v - 1.0));
    err.push_back(e);
    res.push_back(m);
  }
  CHECK(err.back() < 1e-5);
  CHECK(order(err, res) > 1.8);
  for (double v : leaf_field(constant(64), 0.2)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("toric leaf field matches the Legendre formula") {
  // eta = -(1/2) bump'(mu_t(y)) with mu_t the omega_t-moment of y.
  const auto x = fs(256);
  const auto w1 = x.potential().plus(Polynomial::bump());
  const auto eta = leaf_field(toric(256), 0.4);
  const auto wt = SymplecticPotential::interpolate(x.potential(), w1, 0.4);
  const auto db = Polynomial::bump().derivative();
  double e = 0.0;
  for (std::size_t j = 1; j + 1 < eta.size(); ++j)
    e = std::max(e, std::abs(eta[j] + 0.5 * db(wt.moment_of(x.potential().slope(x.coord(j))).m)));
  CHECK(e < 1e-4);
}

TEST_CASE("induced leaves are flow lines of -V") {
  const TimeGrid strip{-1, 0.05, 41};
  std::vector<double> err, res;
  for (int m : {64, 128, 256}) {
    const auto leaf = trace_leaf(induced(m), 0.5, strip);
    CHECK(leaf.position[20] == 0.5);
    double e = 0.0;
    for (int i = 0; i < strip.count; ++i) {
      const double q = std::exp(-2 * strip.at(i));
      e = std::max(e, std::abs(leaf.position[i] - 0.5 * q / (0.5 + 0.5 * q)));
    }
    err.push_back(e);
    res.push_back(m);
  }
  CHECK(err.back() < 1e-7);
  CHECK(order(err, res) > 3.5);
  const auto still = trace_leaf(constant(64), 0.3, strip);
  for (double y : still.position) CHECK(y == doctest::Approx(0.3).epsilon(1e-13));
  CHECK_THROWS_AS(trace_leaf(induced(64), 0.5, TimeGrid{0.01, 0.05, 5}), PreconditionError);
  CHECK_THROWS_AS(trace_leaf(induced(64), 1.5, strip), PreconditionError);
}

TEST_CASE("leaf pullback lemma: second-order trend and negative control") {
  const TimeGrid strip{-1, 0.05, 41};
  std::vector<double> ei, et, res;
  for (int m : {64, 128, 256}) {
    ei.push_back(leaf_pullback_check(induced(m), 0.3, strip));
    et.push_back(leaf_pullback_check(toric(m), 0.3, strip));
    res.push_back(m);
  }
  CHECK(order(ei, res) > 1.8);
  CHECK(order(et, res) > 1.8);
  CHECK(leaf_pullback_check(constant(128), 0.3, strip) < 1e-12);
  const auto base = induced(256);
  const auto& x = std::get<Cp1>(base.manifold());
  const auto bad = base.perturbed([&](double t, std::size_t k) { return 0.1 * t * t * std::sin(pi * x.coord(k)); });
  // The pullback identity does not see the perturbation (Moser flow); the
  // holomorphic extension of the leaf does.
  CHECK(leaf_pullback_check(bad, 0.3, strip) < 10.0 * ei.back());
  const LeafSolver good_leaves(base, strip), bad_leaves(bad, strip);
  CHECK(leaf_holomorphicity_defect(good_leaves, 0.3) < 1e-4);
  CHECK(leaf_holomorphicity_defect(bad_leaves, 0.3) > 100.0 * leaf_holomorphicity_defect(good_leaves, 0.3));
  CHECK_THROWS_AS(leaf_pullback_check(LeafSolver(base, strip), 0.001, 0.01), PreconditionError);
}

TEST_CASE("theta on leaves: harmonic for induced paths, Burns equality for toric leaves") {
  const TimeGrid strip{-1, 0.05, 41};
  std::vector<double> sup, res;
  for (int m : {64, 128, 256}) {
    sup.push_back(theta_on_leaf(trace_leaf(induced(m), 0.4, strip)).kappa_sup);
    res.push_back(m);
  }
  CHECK(sup.back() < 1e-4);
  CHECK(order(sup, res) > 1.8);
  CHECK(theta_on_leaf(trace_leaf(constant(64), 0.4, strip)).kappa_sup < 1e-10);

  // Toric leaf at moment mu: kappa_x = B^2/(4 (A + B t)^2) and curvature exactly -2.
  const TimeGrid wide{-4, 0.25, 29};
  std::vector<double> margin;
  for (int m : {256, 512}) {
    const auto leaf = trace_leaf(toric(m), 0.3, wide);
    const auto th = theta_on_leaf(leaf);
    margin.push_back(burns_margin(th));
    const auto d2b = Polynomial::bump().derivative().derivative();
    for (int i = 2; i + 2 < wide.count; ++i) {
      const double t = wide.at(i), A = 1.0 / 0.21;
      const double k = 0.25 * std::pow(d2b(0.3) / (A + t * d2b(0.3)), 2);
      CHECK(std::abs(th.kappa[i] - k) < 1e-3 * k);
    }
    // Both charts give the same theta.
    const auto far = theta_on_leaf(leaf, 1e-6, true);
    for (int i = 2; i + 2 < wide.count; ++i) CHECK(std::abs(far.kappa[i] - th.kappa[i]) < 1e-3 * th.kappa[i]);
  }
  CHECK(std::abs(margin[1]) <= refinement_tolerance(margin[0], margin[1]));
  CHECK(std::abs(margin[1]) < 0.2);
}

TEST_CASE("Mabuchi derivative against the toric closed form") {
  // dK/dt = 2 pi int bump(mu) (-D_t''(mu) - 2) dmu along w_t = w0 + t bump.
  const auto x = fs(512);
  const auto p = toric(512);
  const auto w1 = x.potential().plus(Polynomial::bump());
  for (double t : {-1.0, 0.5, 2.0}) {
    const auto wt = SymplecticPotential::interpolate(x.potential(), w1, t);
    const int n = 20000;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double mu = double(k) / n;
      const double wgt = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      s += wgt * Polynomial::bump()(mu) * (wt.scalar_curvature(mu) - 2.0);
    }
    CHECK(mabuchi_derivative(p, t) == doctest::Approx(two_pi * s / (3.0 * n)).epsilon(1e-5));
  }
}

TEST_CASE("K-energy theta: fiber integral vs direct difference") {
  std::vector<double> gap, res, ind;
  for (int m : {64, 128, 256}) {
    const auto th = kenergy_theta(toric(m), ThetaOptions{-0.5, 0.5, 0.05, m / 2});
    gap.push_back(th.discrepancy);
    res.push_back(m);
    for (int i = 0; i < th.times.count; ++i) {
      CHECK(th.kappa[i] > 0.0);
      if (m == 256) CHECK(th.kappa[i] == doctest::Approx(toric_kappa_oracle(th.times.at(i))).epsilon(1e-3));
    }
    const auto zero = kenergy_theta(induced(m), ThetaOptions{-0.5, 0.5, 0.05, 32});
    double s = 0.0;
    for (int i = 0; i < zero.times.count; ++i) s = std::max({s, std::abs(zero.kappa[i]), std::abs(zero.kappa_direct[i])});
    ind.push_back(s);
  }
  CHECK(order(gap, res) > 1.8);
  CHECK(order(ind, res) > 1.8);
  CHECK(ind.back() < 5e-3);
  const auto flat = kenergy_theta(constant(64), ThetaOptions{-0.5, 0.5, 0.05, 16});
  for (int i = 0; i < flat.times.count; ++i) {
    CHECK(std::abs(flat.kappa[i]) < 1e-10);
    CHECK(std::abs(flat.kappa_direct[i]) < 1e-10);
  }
}

TEST_CASE("superposition of leaf currents") {
  const TimeGrid strip{-0.5, 0.05, 21};
  const auto p = induced(128);
  const auto tonly = superposition_check(p, [](double t, double) { return std::exp(t) + t * t * t; }, strip);
  // Both sides equal pi [psi'(b) - psi'(a)].
  const double exact = pi * (std::exp(0.5) - std::exp(-0.5));
  CHECK(tonly.lhs == doctest::Approx(exact).epsilon(1e-6));
  CHECK(tonly.rhs == doctest::Approx(exact).epsilon(1e-6));
  const auto none = superposition_check(p, [](double, double) { return 0.0; }, strip);
  CHECK(none.lhs == 0.0);
  CHECK(none.rhs == 0.0);
  auto psi = [](double t, double m) { return std::sin(1.3 * t + 2.0 * m) * std::cos(m - 0.4 * t) + m * m * t; };
  std::vector<double> gap, res;
  for (int m : {64, 128, 256}) {
    gap.push_back(superposition_check(induced(m), psi, strip, m / 2).gap);
    res.push_back(m);
  }
  CHECK(order(gap, res) > 1.8);
  const auto tor = superposition_check(toric(128), psi, strip, 64);
  CHECK(tor.gap < 1e-3 * std::abs(tor.lhs) + 1e-4);
}

TEST_CASE("curvature bounds of Theta") {
  const auto x = fs(256);
  const auto ext = max_extension_time(x.potential(), Polynomial::bump());
  CHECK(ext.forward == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(ext.backward == doctest::Approx(12.0).epsilon(1e-6));
  const Strip strip{-ext.backward, ext.forward + ext.backward};

  // Sharpness probe: kappa = (nV/2) lambda is the equality case of both bounds.
  const TimeGrid g{-6, 0.25, 35};
  std::vector<double> k(g.count);
  for (int i = 0; i < g.count; ++i) k[i] = 0.5 * x.volume() * strip.density(g.at(i));
  const auto probe = curvature_bound_check(g, k, x.volume(), 1, strip);
  CHECK(std::abs(probe.min_margin) < 1e-4);
  CHECK(std::abs(probe.max_strip_excess) < 1e-12);
  CHECK(probe.constant_differential == doctest::Approx(1.0 / pi));

  std::vector<double> margin;
  for (int m : {256, 512}) {
    const auto th = kenergy_theta(toric(m), ThetaOptions{-6, 2.5, 0.25, m / 2});
    const auto rep = curvature_bound_check(th, x.volume(), 1, strip);
    CHECK_FALSE(rep.identically_zero);
    CHECK(rep.max_strip_excess < 0.0);
    margin.push_back(rep.min_margin);
  }
  CHECK(margin[1] >= -refinement_tolerance(margin[0], margin[1]));

  const auto zero = kenergy_theta(induced(256), ThetaOptions{-0.5, 0.5, 0.05, 32});
  CHECK(curvature_bound_check(zero, x.volume(), 1, strip, 1e-3).identically_zero);
  CHECK_THROWS_AS(curvature_bound_check(TimeGrid{0, 0.1, 3}, {1, 1, 1}, x.volume(), 1), PreconditionError);
}
