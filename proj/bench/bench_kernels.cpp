#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "kahler/kernels.hpp"

using namespace kahler;
using namespace kahler::kernels;

namespace {

struct Intervals {
  std::vector<double> a, b, m;
  explicit Intervals(std::size_t n) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> x(-1.0, 1.0), w(0.0, 0.02), mass(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      a.push_back(x(rng));
      b.push_back(a.back() + w(rng));
      m.push_back(mass(rng));
    }
  }
};

struct Disk {
  int n;
  double h;
  std::vector<double> lg, g;
  std::vector<unsigned char> mask;
  explicit Disk(int side) : n(side), h(1.6 / (side - 1)), lg(side * side), g(side * side), mask(side * side) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = -0.8 + i * h, y = -0.8 + j * h, r2 = x * x + y * y;
        const std::size_t k = i + static_cast<std::size_t>(n) * j;
        mask[k] = r2 < 0.64;
        g[k] = 4.0 / ((1 - r2) * (1 - r2));
        lg[k] = std::log(g[k]);
      }
  }
  DiskMargin view() const { return DiskMargin{lg, g, n, h, 0.5, 4, mask}; }
};

template <bool Parallel>
void deposit_1d(benchmark::State& state) {
  const Intervals r(static_cast<std::size_t>(state.range(0)));
  const IntervalDeposit d{r.a, r.b, r.m};
  const BinSpec bins{256, -1.0, 1.0};
  for (auto _ : state) {
    auto w = Parallel ? parallel::deposit(d, bins) : serial::deposit(d, bins);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void deposit_2d(benchmark::State& state) {
  const Intervals r1(static_cast<std::size_t>(state.range(0))), r2(static_cast<std::size_t>(state.range(0)));
  const BoxDeposit d{r1.a, r1.b, r2.a, r2.b, r1.m};
  const BinSpec bins{64, -1.0, 1.0};
  for (auto _ : state) {
    auto w = Parallel ? parallel::deposit(d, bins, bins) : serial::deposit(d, bins, bins);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void disk_margin(benchmark::State& state) {
  const Disk disk(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto w = Parallel ? parallel::disk_margin(disk.view()) : serial::disk_margin(disk.view());
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(deposit_1d<false>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(deposit_1d<true>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(deposit_2d<false>)->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(deposit_2d<true>)->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(disk_margin<false>)->Arg(256)->Arg(512);
BENCHMARK(disk_margin<true>)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
