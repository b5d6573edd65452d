#include <cmath>
#include <random>

#include "doctest.h"
#include "kahler/conventions.hpp"
#include "kahler/error.hpp"
#include "kahler/flows.hpp"

using namespace kahler;

namespace {

Torus ripple(int n, double eps) {
  return Torus::make(n, [eps](double x1, double) { return 1.0 + eps * std::cos(two_pi * x1); });
}

double moment_oracle(double m, double t) {
  const double r = m / (1.0 - m), e = std::exp(2 * t);
  return e * r / (1.0 + e * r);
}

}  // namespace

TEST_CASE("torus flow: period and group law") {
  const auto id = flow(TorusTranslation{}, cplx(1.0, 0.0));
  for (double x1 : {0.0, 0.125, 0.7}) {
    const auto p = id.apply(x1, 0.3);
    CHECK(std::abs(p[0] - x1) < 1e-12);
    CHECK(std::abs(p[1] - 0.3) < 1e-12);
  }
  const HoloField v = TorusTranslation{cplx(0.4, -1.3)};
  const auto a = flow(v, cplx(0.3, 0.1)), b = flow(v, cplx(0.7, -0.2)), ab = flow(v, cplx(1.0, -0.1));
  for (double x1 : {0.05, 0.5, 0.93})
    for (double x2 : {0.0, 0.41}) {
      const auto q = b.apply(x1, x2);
      const auto lhs = a.apply(q[0], q[1]), rhs = ab.apply(x1, x2);
      CHECK(std::abs(lhs[0] - rhs[0]) < 1e-12);
      CHECK(std::abs(lhs[1] - rhs[1]) < 1e-12);
    }
  CHECK(a.then(b).time() == cplx(1.0, -0.1));
  const auto zero = flow(v, 0.0).apply(0.2, 0.9);
  CHECK(zero[0] == 0.2);
  CHECK(zero[1] == 0.9);
}

TEST_CASE("cp1 flow acts on the moment coordinate") {
  const auto w = SymplecticPotential::fubini_study();
  for (double t : {-1.5, 0.25, 2.0})
    for (double m : {0.01, 0.3, 0.5, 0.97}) {
      const auto p = flow(Cp1Dilation{}, t).apply(w, m);
      CHECK(p.m == doctest::Approx(moment_oracle(m, t)).epsilon(1e-13));
      CHECK(p.one_minus_m == doctest::Approx(1.0 - moment_oracle(m, t)).epsilon(1e-12));
    }
  const auto wb = SymplecticPotential(Polynomial::bump() * 0.05);
  const HoloField v = Cp1Dilation{cplx(0.8, 0.3)};
  for (double m : {0.1, 0.6}) {
    const double inner = flow(v, 0.7).apply(wb, m).m;
    CHECK(flow(v, 0.3).apply(wb, inner).m == doctest::Approx(flow(v, 1.0).apply(wb, m).m).epsilon(1e-12));
    CHECK(flow(v, 0.0).apply(wb, m).m == doctest::Approx(m).epsilon(1e-14));
  }
  CHECK(flow(v, 0.5).apply(wb, 0.0).m == 0.0);
  CHECK(flow(v, 0.5).apply(wb, 1.0).m == 1.0);
}

TEST_CASE("torus pullback is a translation of the density") {
  const auto flat = ripple(64, 0.0);
  for (double g : flows::pullback(flow(TorusTranslation{}, 0.37), flat)) CHECK(g == 1.0);
  const double eps = 0.3;
  const auto x = ripple(64, eps);
  for (double t : {0.1, 0.37, 1.0, 2.6}) {
    const auto g = flows::pullback(flow(TorusTranslation{}, t), x);
    for (int i = 0; i < 64; ++i)
      REQUIRE(g[i + 64 * 5] == doctest::Approx(1.0 + eps * std::cos(two_pi * (x.coord(i) + t))).epsilon(1e-12));
    CHECK(torus::integrate(x, g) == doctest::Approx(x.volume()).epsilon(1e-9));
  }
}

TEST_CASE("cp1 pullback preserves volume and has exact end limits") {
  const auto x = Cp1::make(512, SymplecticPotential(Polynomial::bump() * 0.05));
  for (double t : {-0.8, 0.3, 1.0}) {
    const auto d = flows::pullback(flow(Cp1Dilation{}, t), x);
    CHECK(cp1::mass(x, d) == doctest::Approx(x.volume()).epsilon(1e-12));
    // Quadrature of the ratio converges to the same mass at fourth order.
    std::vector<double> err;
    for (int m : {128, 256, 512}) {
      const auto y = Cp1::make(m, x.potential());
      err.push_back(std::abs(cp1::integrate(y, flows::pullback(flow(Cp1Dilation{}, t), y).ratio) - y.volume()));
    }
    CHECK(std::log2(err[0] / err[1]) > 3.5);
    CHECK(std::log2(err[1] / err[2]) > 3.5);
    CHECK(err[2] < 2e-7);
    CHECK(d.ratio.front() == doctest::Approx(std::exp(2 * t)));
    CHECK(d.ratio.back() == doctest::Approx(std::exp(-2 * t)));
    CHECK(d.cumulative->back() == 1.0);
    for (double r : d.ratio) REQUIRE(r > 0.0);
  }
}

TEST_CASE("contractions") {
  const auto flat = ripple(32, 0.0);
  for (auto b : flows::contract(TorusTranslation{}, flat, flat.density())) CHECK(b == cplx(1.0, 0.0));
  for (auto b : flows::contract(TorusTranslation{cplx(0, 0)}, flat, flat.density())) CHECK(b == cplx(0.0, 0.0));
  // cp1: V -| omega_FS against i dbar H with H = |z|^2/(1+|z|^2) = m, whose
  // reduced dbar is D H' = m(1-m).
  const auto x = Cp1::make(128, SymplecticPotential::fubini_study());
  const auto b = flows::contract(Cp1Dilation{}, x, flows::reference(x));
  std::vector<double> h(x.nodes());
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = x.coord(j);
  const auto dh = cp1::dbar(x, h);
  for (std::size_t j = 0; j < h.size(); ++j) CHECK(std::abs(b[j] - cplx(dh[j], 0.0)) < 1e-12);
}

TEST_CASE("exactness on the torus and on cp1") {
  const auto flat = ripple(32, 0.0);
  const auto e = flows::exactness_check(TorusTranslation{}, flat, flat.density());
  CHECK_FALSE(e.exact);
  CHECK(e.obstruction == doctest::Approx(1.0));
  const auto r = ripple(32, 0.4);
  CHECK(flows::exactness_check(TorusTranslation{}, r, r.density()).obstruction == doctest::Approx(1.0));
  const auto z = flows::exactness_check(TorusTranslation{cplx(0, 0)}, flat, flat.density());
  CHECK(z.exact);

  const auto x = Cp1::make(256, SymplecticPotential::fubini_study());
  const auto c = flows::exactness_check(Cp1Dilation{}, x, flows::reference(x));
  REQUIRE(c.exact);
  for (std::size_t j = 0; j < x.nodes(); ++j) CHECK(std::abs(c.h[j] - cplx(x.coord(j) - 0.5, 0.0)) < 1e-12);
}

TEST_CASE("exactness survives omega -> omega + i ddbar v with h -> h + V(v)") {
  const auto x = Cp1::make(512, SymplecticPotential(Polynomial::bump() * 0.05));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coef(-0.05, 0.05);
  const cplx a(0.7, 0.0);
  const auto h0 = flows::exactness_check(Cp1Dilation{a}, x, flows::reference(x)).h;
  for (int trial = 0; trial < 5; ++trial) {
    const double c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
    std::vector<double> v(x.nodes());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double m = x.coord(j);
      v[j] = c1 * std::cos(pi * m) + c2 * m * m * m + c3 * std::sin(2 * pi * m);
    }
    const auto omega_v = cp1::metric_of(x, v);
    const auto e = flows::exactness_check(Cp1Dilation{a}, x, omega_v);
    REQUIRE(e.exact);
    // V(v) = a z dv/dz = a dv/ds = a D v'.
    const auto vd = cp1::dbar(x, v);
    std::vector<cplx> shifted(x.nodes());
    for (std::size_t j = 0; j < v.size(); ++j) shifted[j] = h0[j] + a * vd[j];
    // Compare up to the additive constant.
    cplx mean = 0.0;
    std::vector<double> re(x.nodes());
    for (std::size_t j = 0; j < re.size(); ++j) re[j] = (e.h[j] - shifted[j]).real();
    mean = cp1::omega_mean(x, re);
    double err = 0.0;
    for (std::size_t j = 0; j < re.size(); ++j) err = std::max(err, std::abs(re[j] - mean.real()));
    CHECK(err < 1e-6);
  }
}

TEST_CASE("Hamiltonians") {
  const auto x = Cp1::make(256, SymplecticPotential::fubini_study());
  const auto h = flows::hamiltonian(Cp1Dilation{}, x, flows::reference(x));
  for (std::size_t j = 0; j < h.size(); ++j) CHECK(h[j] == doctest::Approx(x.coord(j) - 0.5).epsilon(1e-12));
  // i dH against (V - V-bar) -| omega: dH/ds = D H' equals the contraction coefficient.
  const auto b = flows::contract(Cp1Dilation{}, x, flows::reference(x));
  const auto dh = cp1::dbar(x, h);
  for (std::size_t j = 0; j < h.size(); ++j) CHECK(std::abs(dh[j] - b[j].real()) < 1e-12);
  for (double v : flows::hamiltonian(Cp1Dilation{cplx(0, 0)}, x, flows::reference(x))) CHECK(v == 0.0);

  const auto flat = ripple(32, 0.0);
  try {
    flows::hamiltonian(TorusTranslation{}, flat, flat.density());
    FAIL("expected an obstruction");
  } catch (const ObstructionError& e) {
    CHECK(e.obstruction() == doctest::Approx(1.0));
  }
  for (double v : flows::hamiltonian(TorusTranslation{cplx(0, 0)}, flat, flat.density())) CHECK(v == 0.0);
  CHECK_THROWS_AS(flows::hamiltonian(Cp1Dilation{cplx(1, 1)}, x, flows::reference(x)), ObstructionError);

  const auto p = Cp1Product::make(32, SymplecticPotential::fubini_study(), SymplecticPotential::fubini_study());
  const auto hh = flows::hamiltonian(ProductDilation{}, p);
  for (std::size_t j = 0; j < p.side(); ++j)
    for (std::size_t i = 0; i < p.side(); ++i) {
      CHECK(hh[0][i + p.side() * j] == doctest::Approx(p.first().coord(i) - 0.5));
      CHECK(hh[1][i + p.side() * j] == doctest::Approx(p.second().coord(j) - 0.5));
    }
}
