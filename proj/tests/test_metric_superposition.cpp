#include <cmath>
#include <random>

#include "doctest.h"
#include "kahler/error.hpp"
#include "kahler/kenergy_foliation.hpp"
#include "kahler/metric_superposition.hpp"

using namespace kahler;

namespace {

struct Family {
  std::vector<ConformalMetric> members;
  std::vector<double> nu;
  double a = 0.0;
};

// Scaled hyperbolic metrics of random disks containing the domain disk.
Family random_family(const DomainGrid& grid, double radius, unsigned seed, int size = 10) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> scale(1.0, 3.0), off(-0.2, 0.2), slack(0.1, 0.5), w(0.1, 1.0);
  Family f;
  f.a = std::numeric_limits<double>::infinity();
  for (int k = 0; k < size; ++k) {
    const double c = scale(rng);
    const std::complex<double> p(off(rng), off(rng));
    const double rho = std::abs(p) + radius + slack(rng);
    f.members.push_back(scaled_poincare(grid, c, p, rho));
    f.nu.push_back(w(rng));
    f.a = std::min(f.a, 1.0 / (2.0 * c));
  }
  return f;
}

}  // namespace

TEST_CASE("curvature margin of Poincare-type metrics") {
  const auto grid = disk_grid(129, 0.8);
  const auto p = scaled_poincare(grid, 1.0);
  // Delta log g = g/2 for 4/(1 - |tau|^2)^2: equality at a = 1/2.
  CHECK(std::abs(curvature_margin(p, 0.5).min) < 1e-7);
  CHECK(curvature_margin(p, 0.6).min < -0.1);
  const auto p3 = scaled_poincare(grid, 3.0);
  const double m3 = curvature_margin(p3, 1.0 / 6.0).min;
  CHECK(std::abs(m3) < 1e-7);
  const auto flat = metric_from(grid, [](double, double) { return 1.0; });
  CHECK(curvature_margin(flat, 0.01).min == doctest::Approx(-0.01));
  // Serial and parallel kernels agree.
  const auto s = curvature_margin(p, 0.5, false), q = curvature_margin(p, 0.5, true);
  CHECK(s.min == q.min);
  CHECK_THROWS_AS(scaled_poincare(grid, 1.0, 0.0, 0.7), PreconditionError);
}

TEST_CASE("superpose is the weighted pointwise sum") {
  const auto grid = disk_grid(64, 0.8);
  const auto p = scaled_poincare(grid, 1.0);
  const auto one = superpose({p}, {1.0});
  CHECK(one.g == p.g);
  const auto two = superpose({p, p}, {1.0, 1.0});
  for (std::size_t k = 0; k < p.g.size(); ++k) CHECK(two.g[k] == doctest::Approx(2.0 * p.g[k]));
  CHECK_THROWS_AS(superpose({p, scaled_poincare(disk_grid(65, 0.8), 1.0)}, {1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(superpose({p}, {-1.0}), PreconditionError);
}

TEST_CASE("superposition proposition on random families") {
  const auto grid = disk_grid(128, 0.8), fine = disk_grid(255, 0.8);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto f = random_family(grid, 0.8, seed);
    const auto r = prop_check(f.members, f.nu, f.a);
    const auto ff = random_family(fine, 0.8, seed);
    const auto rf = prop_check(ff.members, ff.nu, ff.a);
    CHECK(r.margin >= -1e-6);
    // Equality members make the identity vanish up to stencil error.
    CHECK(rf.member_identity >= -refinement_tolerance(r.member_identity, rf.member_identity) - 1e-9);
    CHECK(r.cauchy_gradient >= -1e-6);
    CHECK(r.cauchy_mass >= -1e-6);
  }
}

TEST_CASE("equality probe, single member and the flat negative control") {
  const auto grid = disk_grid(128, 0.8);
  const auto p = scaled_poincare(grid, 2.0, {0.1, -0.05}, 1.1);
  const auto eq = prop_check({p, p, p}, {0.5, 1.0, 1.5}, 0.25);
  CHECK(std::abs(eq.margin) < 1e-4);
  CHECK(eq.mass == doctest::Approx(3.0));
  const auto single = prop_check({p}, {1.0}, 0.25);
  CHECK(single.margin == doctest::Approx(curvature_margin(p, 0.25).min));
  const auto flat = metric_from(grid, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(prop_check({p, flat}, {1.0, 1.0}, 0.25), PreconditionError);
}

TEST_CASE("strip hyperbolic density has curvature -1") {
  // lambda = (pi/L)^2 / (2 sin^2(pi (x - a)/L)) satisfies Delta log lambda = lambda.
  const double a = -12.0, len = 16.0;
  const auto grid = strip_grid(257, a, len);
  const auto lam = metric_from(grid, [&](double x, double) {
    const double s = std::sin(M_PI * (x - a) / len);
    return (M_PI / len) * (M_PI / len) / (2.0 * s * s);
  });
  const auto m = curvature_margin(lam, 1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < m.margin.size(); ++k) {
    const double x = grid.x(static_cast<int>(k % grid.n)) - a;
    // Stencil error grows like (h/x)^6 toward the edges; score the bulk.
    if (std::isfinite(m.margin[k]) && x > 1.0 && x < len - 1.0) worst = std::max(worst, std::abs(m.margin[k]) / lam.g[k]);
  }
  CHECK(worst < 1e-5);
}
