#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "kahler/kernels.hpp"

using namespace kahler;
using namespace kahler::kernels;

namespace {

struct Intervals {
  std::vector<double> a, b, m;
};

Intervals random_intervals(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> x(-1.2, 1.2), w(0.0, 0.05), mass(0.0, 1.0);
  Intervals r;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = x(rng);
    r.a.push_back(lo);
    r.b.push_back(k % 7 == 0 ? lo : lo + w(rng));
    r.m.push_back(mass(rng));
  }
  return r;
}

}  // namespace

TEST_CASE("interval deposit conserves mass and matches the serial reference") {
  const auto r = random_intervals(100000, 3);
  const IntervalDeposit d{r.a, r.b, r.m};
  const BinSpec bins{200, -1.0, 1.0};
  const auto s = serial::deposit(d, bins);
  const auto p = parallel::deposit(d, bins);
  const double total = std::accumulate(r.m.begin(), r.m.end(), 0.0);
  CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(total).epsilon(1e-12));
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(p[i] == doctest::Approx(s[i]).epsilon(1e-11));
}

TEST_CASE("interval deposit geometry") {
  const BinSpec bins{4, 0.0, 1.0};
  const std::vector<double> a{0.0}, b{0.5}, m{1.0};
  const auto s = serial::deposit(IntervalDeposit{a, b, m}, bins);
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(0.5));
  CHECK(s[2] == 0.0);
  // Out-of-range mass lands in the end bins.
  const std::vector<double> a2{-3.0, 5.0}, m2{1.0, 2.0};
  const auto e = serial::deposit(IntervalDeposit{a2, a2, m2}, bins);
  CHECK(e[0] == 1.0);
  CHECK(e[3] == 2.0);
}

TEST_CASE("box deposit agrees serial vs parallel") {
  const auto r1 = random_intervals(20000, 9), r2 = random_intervals(20000, 10);
  const BoxDeposit d{r1.a, r1.b, r2.a, r2.b, r1.m};
  const BinSpec b1{32, -1.0, 1.0}, b2{48, -1.0, 1.0};
  const auto s = serial::deposit(d, b1, b2);
  const auto p = parallel::deposit(d, b1, b2);
  REQUIRE(s.size() == 32u * 48u);
  const double total = std::accumulate(r1.m.begin(), r1.m.end(), 0.0);
  CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(total).epsilon(1e-12));
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(p[i] == doctest::Approx(s[i]).epsilon(1e-11));
}

TEST_CASE("disk margin: exact for the hyperbolic disk and serial == parallel") {
  // g = 4/(1 - |z|^2)^2: Lap log g = 2 g, so the margin with a = 1/2 vanishes.
  const int n = 129;
  const double h = 1.6 / (n - 1);
  std::vector<double> lg(n * n), g(n * n);
  std::vector<unsigned char> mask(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = -0.8 + i * h, y = -0.8 + j * h, r2 = x * x + y * y;
      const std::size_t k = i + static_cast<std::size_t>(n) * j;
      mask[k] = r2 < 0.64;
      g[k] = 4.0 / ((1 - r2) * (1 - r2));
      lg[k] = std::log(g[k]);
    }
  const DiskMargin d{lg, g, n, h, 0.5, 4, mask};
  const auto s = serial::disk_margin(d);
  const auto p = parallel::disk_margin(d);
  double worst = 0.0;
  int interior = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(p[k] == s[k]);
    if (std::isfinite(s[k])) {
      worst = std::max(worst, std::abs(s[k]) / g[k]);
      ++interior;
    }
  }
  CHECK(interior > n * n / 3);
  CHECK(worst < 1e-6);
}
