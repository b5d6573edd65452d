#include <cmath>
#include <random>

#include "doctest.h"
#include "kahler/conventions.hpp"
#include "kahler/error.hpp"
#include "kahler/geodesics.hpp"

using namespace kahler;

namespace {

Cp1 fs(int m) { return Cp1::make(m, SymplecticPotential::fubini_study()); }
SymplecticPotential bumped(double c) { return SymplecticPotential(Polynomial::bump() * c); }

// Energy of an invariant function by the integrated-by-parts continuum formula
// E(f) = 2 pi int f dm - pi int D f'^2 dm, composite Simpson on a fine grid.
double energy_oracle(const std::function<double(double)>& f, const std::function<double(double)>& df) {
  const int n = 40000;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double m = double(k) / n;
    const double wt = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    s += wt * (two_pi * f(m) - pi * m * (1 - m) * df(m) * df(m));
  }
  return s / (3.0 * n);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

}  // namespace

TEST_CASE("time grids") {
  const auto g = TimeGrid::uniform(-1, 1, 5);
  CHECK(g.step == 0.5);
  CHECK(g.last() == 1.0);
  CHECK_THROWS_AS(TimeGrid::uniform(1, 0, 3), PreconditionError);
}

TEST_CASE("energy: normalisation, constants and the two routes") {
  const auto x = Manifold(Cp1::make(256, bumped(0.05)));
  const std::vector<double> zero(node_count(x), 0.0), c(node_count(x), 1.7);
  CHECK(aubin_yau_energy(x, zero) == 0.0);
  CHECK(aubin_yau_energy(x, c) == doctest::Approx(1.7 * volume(x)).epsilon(1e-12));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> a(-0.03, 0.03);
  auto check_routes = [&](const Manifold& y) {
    for (int trial = 0; trial < 4; ++trial) {
      const double c1 = a(rng), c2 = a(rng), c3 = a(rng);
      std::vector<double> u(node_count(y));
      for (std::size_t k = 0; k < u.size(); ++k) {
        const auto p = node_coord(y, k);
        u[k] = c1 * std::cos(two_pi * p[0]) + c2 * std::sin(two_pi * (p[0] + p[1])) + c3 * p[1];
      }
      if (std::holds_alternative<Torus>(y))
        for (std::size_t k = 0; k < u.size(); ++k) u[k] -= c3 * node_coord(y, k)[1];
      const double e1 = aubin_yau_energy(y, u, EnergyRoute::segment_quadrature);
      const double e2 = aubin_yau_energy(y, u, EnergyRoute::polynomial);
      CHECK(std::abs(e1 - e2) < 1e-8);
    }
  };
  check_routes(x);
  check_routes(Manifold(Torus::make(32, [](double x1, double x2) { return 1.2 + 0.3 * std::sin(two_pi * x1) * std::cos(two_pi * x2); })));
  check_routes(Manifold(Cp1Product::make(48, bumped(0.05), SymplecticPotential::fubini_study())));
  std::vector<double> bad(node_count(x));
  for (std::size_t k = 0; k < bad.size(); ++k) bad[k] = -20.0 * std::pow(node_coord(x, k)[0] - 0.5, 2);
  CHECK_THROWS_AS(aubin_yau_energy(x, bad), PositivityError);
}

TEST_CASE("induced geodesic on cp1 matches the closed form") {
  const auto x = fs(256);
  const auto path = induced_geodesic(Cp1Dilation{}, Manifold(x), TimeGrid::uniform(-1, 1, 11));
  CHECK(path.origin() == Provenance::induced);
  CHECK(path.gauge().kind == GaugeRecord::Kind::energy_zero);
  for (double t : {-0.8, 0.25, 1.0}) {
    // Oracle: the pullback potential log(1 - m + e^{2t} m) with its energy gauge
    // computed independently.
    const double e = std::exp(2 * t);
    auto f = [e](double m) { return std::log(1 - m + e * m); };
    auto df = [e](double m) { return (e - 1) / (1 - m + e * m); };
    const double c = -energy_oracle(f, df) / two_pi;
    const auto u = path.potential(t);
    double err = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) err = std::max(err, std::abs(u[j] - (f(x.coord(j)) + c)));
    CHECK(err < 1e-7);
    CHECK(std::abs(aubin_yau_energy(Manifold(x), u)) < 1e-12);
  }
}

TEST_CASE("induced geodesic obstruction and override on the torus") {
  const auto flat = Torus::make(32, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(induced_geodesic(TorusTranslation{}, Manifold(flat), TimeGrid::uniform(0, 1, 5)), ObstructionError);
  InducedOptions o;
  o.override_exactness = true;
  const auto p = induced_geodesic(TorusTranslation{}, Manifold(flat), TimeGrid::uniform(0, 1, 5), o);
  for (double v : p.potential(0.37)) CHECK(std::abs(v) < 1e-15);
  CHECK(geodesic_residual(p, 0.5).deviation == 0.0);
  CHECK(hcmae_residual(p, 0.5) == 0.0);

  const double eps = 0.3;
  const auto x = Torus::make(64, [eps](double x1, double) { return 1.0 + eps * std::cos(two_pi * x1); });
  const auto q = induced_geodesic(TorusTranslation{}, Manifold(x), TimeGrid::uniform(0, 2, 9), o);
  // u_t = -(eps/pi^2)(cos 2pi(x1+t) - cos 2pi x1) + c(t).
  const auto u = q.potential(0.3);
  double spread = 0.0;
  std::vector<double> d(u.size());
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) {
      const double x1 = x.coord(i);
      d[i + 64 * j] = u[i + 64 * j] + eps / (pi * pi) * (std::cos(two_pi * (x1 + 0.3)) - std::cos(two_pi * x1));
    }
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  spread = *hi - *lo;
  CHECK(spread < 1e-12);
  CHECK(sup_diff(q.potential(0.3), q.potential(1.3)) < 1e-8);
  CHECK(sup_diff(q.potential(0.3), q.potential(0.8)) > 1e-2);
  CHECK(geodesic_residual(q, 0.5).deviation > 0.1);
}

TEST_CASE("geodesic residual converges at second order or better") {
  std::vector<double> res, dev;
  for (int m : {64, 128, 256}) {
    const auto p = induced_geodesic(Cp1Dilation{}, Manifold(fs(m)), TimeGrid::uniform(-1, 1, 5));
    const auto r = geodesic_residual(p, 0.5);
    res.push_back(m);
    dev.push_back(r.deviation);
    // The HCMAE density is c times the volume ratio, after the same gauge.
    const double h = hcmae_residual(p, 0.5);
    const auto ratio = volume_ratio(p.manifold(), p.potential(0.5));
    double direct = 0.0;
    for (std::size_t k = 0; k < ratio.size(); ++k) direct = std::max(direct, std::abs((r.c[k] - r.mean) * ratio[k]));
    CHECK(h == doctest::Approx(direct).epsilon(1e-6));
  }
  CHECK(convergence_order(res, dev).slope >= 1.8);
  const auto p = induced_geodesic(Cp1Dilation{}, Manifold(fs(64)), TimeGrid::uniform(-1, 1, 5));
  CHECK_THROWS_AS(geodesic_residual(p, 1.0), PreconditionError);
}

TEST_CASE("energy is affine along canonical and regauged paths") {
  const auto x = fs(128);
  const auto p = induced_geodesic(Cp1Dilation{}, Manifold(x), TimeGrid::uniform(-1, 1, 9));
  const auto q = p.regauged(0.4, -1.3);
  CHECK(q.origin() == Provenance::manual);
  CHECK(q.gauge().kind == GaugeRecord::Kind::affine);
  std::vector<double> t, e;
  for (int i = 0; i < 9; ++i) {
    CHECK(std::abs(aubin_yau_energy(p.manifold(), p.sample(i))) < 1e-12);
    t.push_back(q.grid().at(i));
    e.push_back(aubin_yau_energy(q.manifold(), q.sample(i)));
  }
  const auto fit = fit_line(t, e);
  CHECK(fit.slope == doctest::Approx(-1.3 * two_pi));
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("velocity is a Hamiltonian for omega_t and is monotone in t") {
  const auto x = Cp1::make(256, bumped(0.05));
  const auto p = induced_geodesic(Cp1Dilation{}, Manifold(x), TimeGrid::uniform(-1, 1, 5));
  for (double t : {-0.5, 0.4}) {
    // V -| omega_t = i dbar u-dot_tau with u-dot_tau = u-dot_t / 2:  a D R_t = D u-dot' / 2.
    const auto omega_t = flows::pullback(flow(Cp1Dilation{}, t), x);
    const auto b = flows::contract(Cp1Dilation{}, x, omega_t);
    const auto d = cp1::dbar(x, p.velocity(t));
    double err = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) err = std::max(err, std::abs(0.5 * d[j] - b[j].real()));
    CHECK(err < 1e-4);
  }
  std::vector<double> prev = p.velocity(-0.9);
  for (double t = -0.8; t < 0.95; t += 0.1) {
    const auto v = p.velocity(t);
    for (std::size_t j = 0; j < v.size(); ++j) REQUIRE(v[j] >= prev[j] - 1e-9);
    prev = v;
  }
}

TEST_CASE("legendre route agrees with the Poisson route") {
  const auto x = Cp1::make(512, bumped(0.05));
  InducedOptions o;
  o.route = InducedOptions::Route::legendre;
  const auto a = induced_geodesic(Cp1Dilation{cplx(0.8, 0)}, Manifold(x), TimeGrid::uniform(-1, 1, 5));
  const auto b = induced_geodesic(Cp1Dilation{cplx(0.8, 0)}, Manifold(x), TimeGrid::uniform(-1, 1, 5), o);
  for (double t : {-0.7, 0.9}) CHECK(sup_diff(a.potential(t), b.potential(t)) < 1e-7);
}

TEST_CASE("toric geodesics") {
  const auto x = Cp1::make(256, bumped(0.05));
  const auto same = toric_geodesic(x, x.potential(), TimeGrid::uniform(0, 1, 5));
  for (double v : same.potential(0.5)) CHECK(std::abs(v) < 1e-14);
  CHECK(geodesic_residual(same, 0.5).deviation < 1e-9);

  // An affine shift b m is the induced path of rate a = -b/2, up to gauge.
  const double slope = -1.4;
  const auto affine = toric_geodesic(x, x.potential().plus(Polynomial::affine(0.2, slope)), TimeGrid::uniform(0, 1, 5));
  const auto induced = induced_geodesic(Cp1Dilation{cplx(-slope / 2, 0)}, Manifold(x), TimeGrid::uniform(0, 1, 5));
  for (double t : {0.25, 0.75}) {
    auto u = affine.potential(t);
    const auto v = induced.potential(t);
    const double shift = mean_omega(affine.manifold(), u) - mean_omega(induced.manifold(), v);
    for (auto& val : u) val -= shift;
    CHECK(sup_diff(u, v) < 1e-6);
  }

  // Closed-form velocity against the path's finite differences.
  const auto w1 = x.potential().plus(Polynomial::bump() * 0.05);
  const auto p = toric_geodesic(x, w1, TimeGrid::uniform(0, 1, 5));
  CHECK(sup_diff(p.velocity(0.5), toric_velocity(x, w1, 0.5)) < 1e-8);

  std::vector<double> res, dev;
  for (int m : {64, 128, 256}) {
    const auto y = Cp1::make(m, bumped(0.05));
    const auto q = toric_geodesic(y, y.potential().plus(Polynomial::bump() * 0.05), TimeGrid::uniform(0, 1, 5));
    res.push_back(m);
    dev.push_back(geodesic_residual(q, 0.5).deviation);
  }
  CHECK(convergence_order(res, dev).slope >= 1.8);
  CHECK_THROWS_AS(toric_geodesic(x, x.potential().plus(Polynomial::bump() * 8.0), TimeGrid::uniform(0, 1, 5)),
                  PositivityError);
}

TEST_CASE("maximal extension time") {
  const auto w0 = SymplecticPotential::fubini_study();
  const auto inf = std::numeric_limits<double>::infinity();
  CHECK(max_extension_time(w0, Polynomial::affine(0.3, -2.0)).forward == inf);
  CHECK(max_extension_time(w0, Polynomial()).backward == inf);
  // Brute force: smallest |t| on a (t, m) scan where 1/(m(1-m)) + t dw'' <= 0.
  const Polynomial b2 = Polynomial::bump().derivative().derivative();
  auto brute = [&](double sign) {
    for (double t = 0.0; t < 50.0; t += 1e-3)
      for (int k = 1; k < 2000; ++k) {
        const double m = k / 2000.0;
        if (1.0 / (m * (1 - m)) + sign * t * b2(m) <= 0.0) return t;
      }
    return inf;
  };
  const auto e = max_extension_time(w0, Polynomial::bump());
  CHECK(e.forward == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(e.backward == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(std::abs(brute(1.0) - e.forward) < 2e-3);
  CHECK(std::abs(brute(-1.0) - e.backward) < 2e-3);
}

TEST_CASE("asymptotic slope and sup-norm invariance") {
  const auto x = fs(512);
  InducedOptions o;
  o.route = InducedOptions::Route::legendre;
  const auto p = induced_geodesic(Cp1Dilation{}, Manifold(x), TimeGrid::uniform(-5, 5, 11), o);
  std::vector<double> ts;
  for (int k = -5; k <= 5; ++k) ts.push_back(k);
  const auto r = asymptotic_slope(p, 20.0, ts, 1e-6, 1e-3);
  CHECK(r.limit == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.sup_norm_spread < 1e-8);
  for (double s : r.sup_norms) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  // The cap where u-dot_T < 1 - eps has area O(e^{-2T}): only the pole node.
  CHECK(r.velocity_deviation_measure <= x.weights()[0] * two_pi + 1e-15);
  // Closed form u_T/T = 1 + log(m + (1-m) e^{-2T})/T.
  for (std::size_t j = 1; j < x.nodes(); j += 37) {
    const double m = x.coord(j);
    CHECK(r.slope[j] == doctest::Approx(1.0 + std::log(m + (1 - m) * std::exp(-40.0)) / 20.0).epsilon(1e-9));
  }

  const auto flat = Torus::make(16, [](double, double) { return 1.0; });
  InducedOptions ov;
  ov.override_exactness = true;
  const auto z = induced_geodesic(TorusTranslation{}, Manifold(flat), TimeGrid::uniform(0, 1, 3), ov);
  const auto rz = asymptotic_slope(z, 20.0, {0.0, 1.0}, 1e-6, 1e-3);
  for (double v : rz.velocity) CHECK(v == 0.0);
  for (double v : rz.slope) CHECK(v == 0.0);
}

TEST_CASE("multi-parameter geodesic on the product") {
  const int m = 48;
  const auto x = Cp1Product::make(m, SymplecticPotential::fubini_study(), bumped(0.05));
  const ProductDilation v{cplx(1, 0), cplx(0.5, 0)};
  const auto p = multi_geodesic(v, x, TimeGrid::uniform(-1, 1, 5), TimeGrid::uniform(-1, 1, 5));
  CHECK(p.time_dimension() == 2);
  const auto f1 = induced_geodesic(Cp1Dilation{v.a1}, Manifold(x.first()), TimeGrid::uniform(-1, 1, 3));
  const auto f2 = induced_geodesic(Cp1Dilation{v.a2}, Manifold(x.second()), TimeGrid::uniform(-1, 1, 3));
  const auto sum = product::split_sum(x, f1.potential(0.3), f2.potential(-0.6));
  CHECK(sup_diff(p.potential(0.3, -0.6), sum) < 1e-10);
  CHECK(multi_geodesic_system_residual(p, 0.3, -0.6) < 5e-3);
  // Symmetric mixed differences.
  CHECK(sup_diff(p.acceleration(0.2, 0.1, 0, 1), p.acceleration(0.2, 0.1, 1, 0)) < 1e-12);
  const auto line = p.restrict_line({0.0, 0.0}, {1.0, 1.0}, TimeGrid::uniform(-0.5, 0.5, 5));
  CHECK(geodesic_residual(line, 0.0).deviation < 5e-3);

  const auto zero = multi_geodesic(ProductDilation{cplx(0, 0), cplx(0, 0)}, x, TimeGrid::uniform(-1, 1, 3),
                                   TimeGrid::uniform(-1, 1, 3));
  for (double val : zero.potential(0.5, 0.5)) CHECK(std::abs(val) < 1e-14);
}

TEST_CASE("path bundles") {
  const auto p = induced_geodesic(Cp1Dilation{}, Manifold(fs(16)), TimeGrid::uniform(0, 1, 3));
  const auto dir = std::filesystem::temp_directory_path() / "kahler_bundle_test";
  std::filesystem::remove_all(dir);
  write_path_bundle(p, dir);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "t_0002.csv"));
}
