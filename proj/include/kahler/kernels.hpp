#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kahler {

/// Uniform bins on [lo, hi]; mass outside the range is deposited in the end bins.
struct BinSpec {
  int count = 256;
  double lo = -1.0;
  double hi = 1.0;

  double width() const noexcept { return (hi - lo) / count; }
  double edge(int i) const noexcept { return lo + width() * i; }
};

/// Hot loops in two interchangeable forms.  `serial` is the reference
/// implementation; `parallel` splits the same work over OpenMP threads
/// (per-thread partial histograms merged at the end, row blocks for stencils)
/// and must agree with it to round-off.
namespace kernels {

/// Deposits mass[k] uniformly over the interval [a[k], b[k]] (a point when the
/// interval is shorter than 1e-14 bin widths).
struct IntervalDeposit {
  std::span<const double> a, b, mass;
};
/// Deposits mass[k] uniformly over the box [a1,b1] x [a2,b2]; bins indexed i + n1 j.
struct BoxDeposit {
  std::span<const double> a1, b1, a2, b2, mass;
};

/// Curvature margin of a conformal metric on a uniform square grid:
/// (1/4) Laplacian(log g) - a g with the sixth-order seven-point Laplacian per
/// axis; nodes within max(margin, 3) nodes of the domain edge are left at +infinity.
struct DiskMargin {
  std::span<const double> log_g;  ///< n x n, row-major (i + n j)
  std::span<const double> g;
  int n = 0;
  double h = 0.0;
  double a = 0.0;
  int margin = 4;
  std::span<const unsigned char> mask;  ///< nonzero where the node is inside the domain
};

namespace serial {
std::vector<double> deposit(const IntervalDeposit& d, const BinSpec& bins);
std::vector<double> deposit(const BoxDeposit& d, const BinSpec& b1, const BinSpec& b2);
std::vector<double> disk_margin(const DiskMargin& d);
}  // namespace serial

namespace parallel {
std::vector<double> deposit(const IntervalDeposit& d, const BinSpec& bins);
std::vector<double> deposit(const BoxDeposit& d, const BinSpec& b1, const BinSpec& b2);
std::vector<double> disk_margin(const DiskMargin& d);
}  // namespace parallel

}  // namespace kernels
}  // namespace kahler
