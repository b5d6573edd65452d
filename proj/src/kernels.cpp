#include "kahler/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <omp.h>

namespace kahler::kernels {

namespace {

int bin_of(const BinSpec& b, double v) {
  const int i = static_cast<int>(std::floor((v - b.lo) / b.width()));
  return std::clamp(i, 0, b.count - 1);
}

// Fractions of [a, b] falling into each bin, passed to emit(bin, fraction).
template <class Emit>
void spread(const BinSpec& bins, double a, double b, Emit emit) {
  if (a > b) std::swap(a, b);
  const double len = b - a;
  if (len <= 1e-14 * bins.width()) {
    emit(bin_of(bins, 0.5 * (a + b)), 1.0);
    return;
  }
  const int first = bin_of(bins, a), last = bin_of(bins, b);
  for (int i = first; i <= last; ++i) {
    // The end bins absorb everything outside [lo, hi].
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : bins.edge(i);
    const double hi = i == bins.count - 1 ? std::numeric_limits<double>::infinity() : bins.edge(i + 1);
    const double overlap = std::min(b, hi) - std::max(a, lo);
    if (overlap > 0.0) emit(i, overlap / len);
  }
}

void check(const IntervalDeposit& d) {
  if (d.a.size() != d.b.size() || d.a.size() != d.mass.size()) throw std::invalid_argument("deposit: size mismatch");
}

void check(const BoxDeposit& d) {
  const std::size_t n = d.mass.size();
  if (d.a1.size() != n || d.b1.size() != n || d.a2.size() != n || d.b2.size() != n)
    throw std::invalid_argument("deposit: size mismatch");
}

void deposit_range(const IntervalDeposit& d, const BinSpec& bins, std::size_t from, std::size_t to,
                   std::vector<double>& out) {
  for (std::size_t k = from; k < to; ++k)
    spread(bins, d.a[k], d.b[k], [&](int i, double f) { out[i] += f * d.mass[k]; });
}

void deposit_range(const BoxDeposit& d, const BinSpec& b1, const BinSpec& b2, std::size_t from, std::size_t to,
                   std::vector<double>& out) {
  std::vector<std::pair<int, double>> first;
  for (std::size_t k = from; k < to; ++k) {
    first.clear();
    spread(b1, d.a1[k], d.b1[k], [&](int i, double f) { first.emplace_back(i, f); });
    spread(b2, d.a2[k], d.b2[k], [&](int j, double f) {
      for (const auto& [i, fi] : first) out[i + static_cast<std::size_t>(b1.count) * j] += fi * f * d.mass[k];
    });
  }
}

// Sixth-order second difference coefficients, offsets -3..3, over h^2.
constexpr double c6[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};

double margin_at(const DiskMargin& d, int i, int j) {
  const int n = d.n;
  const std::size_t k = i + static_cast<std::size_t>(n) * j;
  if (!d.mask[k]) return std::numeric_limits<double>::infinity();
  // Nodes within `margin` of the boundary are excluded; the stencil needs 3.
  const int reach = std::max(d.margin, 3);
  for (int r = -reach; r <= reach; ++r) {
    const int ii = i + r, jj = j + r;
    if (ii < 0 || jj < 0 || ii >= n || jj >= n) return std::numeric_limits<double>::infinity();
    if (!d.mask[ii + static_cast<std::size_t>(n) * j] || !d.mask[i + static_cast<std::size_t>(n) * jj])
      return std::numeric_limits<double>::infinity();
  }
  double lap = 0.0;
  for (int r = -3; r <= 3; ++r)
    lap += c6[r + 3] * (d.log_g[(i + r) + static_cast<std::size_t>(n) * j] + d.log_g[i + static_cast<std::size_t>(n) * (j + r)]);
  lap /= d.h * d.h;
  return 0.25 * lap - d.a * d.g[k];
}

}  // namespace

namespace serial {

std::vector<double> deposit(const IntervalDeposit& d, const BinSpec& bins) {
  check(d);
  std::vector<double> out(bins.count, 0.0);
  deposit_range(d, bins, 0, d.mass.size(), out);
  return out;
}

std::vector<double> deposit(const BoxDeposit& d, const BinSpec& b1, const BinSpec& b2) {
  check(d);
  std::vector<double> out(static_cast<std::size_t>(b1.count) * b2.count, 0.0);
  deposit_range(d, b1, b2, 0, d.mass.size(), out);
  return out;
}

std::vector<double> disk_margin(const DiskMargin& d) {
  std::vector<double> out(static_cast<std::size_t>(d.n) * d.n);
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i) out[i + static_cast<std::size_t>(d.n) * j] = margin_at(d, i, j);
  return out;
}

}  // namespace serial

namespace parallel {

namespace {

// Splits [0, n) into contiguous per-thread blocks and merges partial
// histograms in thread order, so results do not depend on scheduling.
template <class Fill>
std::vector<double> blocked(std::size_t n, std::size_t bins, Fill fill) {
  const int threads = omp_get_max_threads();
  std::vector<std::vector<double>> partial(threads, std::vector<double>(bins, 0.0));
#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    const std::size_t from = n * t / threads, to = n * (t + 1) / threads;
    fill(from, to, partial[t]);
  }
  std::vector<double> out(bins, 0.0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < bins; ++i) out[i] += p[i];
  return out;
}

}  // namespace

std::vector<double> deposit(const IntervalDeposit& d, const BinSpec& bins) {
  check(d);
  return blocked(d.mass.size(), bins.count, [&](std::size_t from, std::size_t to, std::vector<double>& out) {
    deposit_range(d, bins, from, to, out);
  });
}

std::vector<double> deposit(const BoxDeposit& d, const BinSpec& b1, const BinSpec& b2) {
  check(d);
  return blocked(d.mass.size(), static_cast<std::size_t>(b1.count) * b2.count,
                 [&](std::size_t from, std::size_t to, std::vector<double>& out) {
                   deposit_range(d, b1, b2, from, to, out);
                 });
}

std::vector<double> disk_margin(const DiskMargin& d) {
  std::vector<double> out(static_cast<std::size_t>(d.n) * d.n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i) out[i + static_cast<std::size_t>(d.n) * j] = margin_at(d, i, j);
  return out;
}

}  // namespace parallel
}  // namespace kahler::kernels
