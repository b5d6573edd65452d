#pragma once

#include <array>
#include <optional>
#include <vector>

#include "kahler/geodesics.hpp"
#include "kahler/kernels.hpp"

namespace kahler {

/// Weighted histogram on R^k (k = 1, 2); weights indexed i + n1 j.
struct EmpiricalMeasure {
  int dimension = 1;
  std::vector<BinSpec> bins;
  std::vector<double> weights;
  double total = 0.0;
};

/// Pushforward of omega_t^n/n! under the velocity (k = 1) or time gradient
/// (k = 2).  Cell masses come from the discrete omega_t-moment map (their sum
/// is V(X) up to round-off) and are spread uniformly over each cell's
/// velocity range; torus nodes are atoms of mass 2 h^2 g_t.
EmpiricalMeasure pushforward(const GeodesicPath& path, std::array<double, 2> t, const std::vector<BinSpec>& bins,
                             bool use_parallel = true);
/// Exact bin masses of the uniform measure of the given total on the bins' box.
EmpiricalMeasure uniform_measure(const std::vector<BinSpec>& bins, double total);
/// Sup distance between normalised CDFs (k = 1) or the largest such distance
/// over the sixteen slices theta_k = pi k/16 (k = 2).  Bins must match.
double measure_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// A_t, B_x and A.  Intervals for k = 1; a point cloud with its convex hull for k = 2.
struct RangeSet {
  int dimension = 1;
  double lo = 0.0, hi = 0.0;
  std::vector<std::array<double, 2>> points;
  std::vector<std::array<double, 2>> hull;  ///< counter-clockwise, no repeated vertex
  double hull_defect = 0.0;      ///< max distance from a cloud point to the hull
  double coverage_defect = 0.0;  ///< max distance from a hull point to the cloud (when computed)
};

RangeSet interval_set(double lo, double hi);
/// Cloud, hull and hull defect; coverage defect on request (spacing of the hull sample).
RangeSet cloud_set(std::vector<std::array<double, 2>> points, std::optional<double> coverage_spacing = std::nullopt);

RangeSet set_A(const GeodesicPath& path, std::array<double, 2> t, std::optional<double> coverage_spacing = std::nullopt);
/// B_x over the given time grid(s); `limits` adds closed-form endpoint limits (k = 1).
RangeSet set_B(const GeodesicPath& path, std::size_t node, const std::vector<TimeGrid>& times,
               std::optional<std::array<double, 2>> limits = std::nullopt);
/// B_x for many nodes in one sweep over time.
std::vector<RangeSet> set_B(const GeodesicPath& path, const std::vector<std::size_t>& nodes,
                            const std::vector<TimeGrid>& times);

/// Hausdorff distance between two intervals or two convex hulls.
double hausdorff(const RangeSet& a, const RangeSet& b);

/// Andrew's monotone chain; collinear points dropped.
std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts);
/// Euclidean distance from p to a convex polygon (0 inside).
double distance_to_hull(const std::vector<std::array<double, 2>>& hull, std::array<double, 2> p);

/// Image of the moment map (H_1, ..., H_k) over the grid.
struct MomentImage {
  RangeSet image;                 ///< in the mean-zero gauge
  std::array<double, 2> gauge{};  ///< offset restoring the normalisation H(fixed point z = 0) = 0
};
MomentImage moment_image(const Cp1Dilation& v, const Cp1& x, int stride = 1);
MomentImage moment_image(const ProductDilation& v, const Cp1Product& x, int stride = 1,
                         std::optional<double> coverage_spacing = std::nullopt);

}  // namespace kahler
