#include "kahler/dh_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "kahler/conventions.hpp"
#include "kahler/error.hpp"
#include "kahler/parallel.hpp"

namespace kahler {

namespace {

using Point = std::array<double, 2>;

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - s * dx, p[1] - a[1] - s * dy);
}

// Moment-map images G = (m1 + D1 u_1, m2 + D2 u_2) of the product grid nodes.
std::array<std::vector<double>, 2> product_moments(const Cp1Product& x, const std::vector<double>& u) {
  const std::size_t n = x.side();
  std::array<std::vector<double>, 2> g{std::vector<double>(u.size()), std::vector<double>(u.size())};
  std::vector<double> line(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) line[i] = u[i + n * j];
    const auto d = cp1::dbar(x.first(), line);
    for (std::size_t i = 0; i < n; ++i) g[0][i + n * j] = x.first().coord(i) + d[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) line[j] = u[i + n * j];
    const auto d = cp1::dbar(x.second(), line);
    for (std::size_t j = 0; j < n; ++j) g[1][i + n * j] = x.second().coord(j) + d[j];
  }
  return g;
}

// Signed areas of the images of the product grid cells under G.
std::vector<double> product_cell_masses(const Cp1Product& x, const std::vector<double>& u) {
  const auto g = product_moments(x, u);
  const std::size_t n = x.side();
  std::vector<double> mass((n - 1) * (n - 1));
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t k[4] = {i + n * j, i + 1 + n * j, i + 1 + n * (j + 1), i + n * (j + 1)};
      double area = 0.0;
      for (int c = 0; c < 4; ++c) {
        const std::size_t p = k[c], q = k[(c + 1) % 4];
        area += g[0][p] * g[1][q] - g[0][q] * g[1][p];
      }
      mass[i + (n - 1) * j] = 0.5 * area * x.volume();
    }
  return mass;
}

void require_positive_masses(const std::vector<double>& mass) {
  for (std::size_t k = 0; k < mass.size(); ++k)
    if (mass[k] < 0.0) {
      std::ostringstream os;
      os << "negative omega_t cell mass " << mass[k] << " at cell " << k;
      throw PositivityError(os.str(), static_cast<double>(k));
    }
}

bool same_bins(const BinSpec& a, const BinSpec& b) { return a.count == b.count && a.lo == b.lo && a.hi == b.hi; }

}  // namespace

// ---------------------------------------------------------------------------
// Pushforward measures

EmpiricalMeasure pushforward(const GeodesicPath& path, std::array<double, 2> t, const std::vector<BinSpec>& bins,
                             bool use_parallel) {
  const int k = path.time_dimension();
  if (static_cast<int>(bins.size()) != k) throw PreconditionError("one bin spec per time dimension");
  for (const auto& b : bins)
    if (b.count < 1 || !(b.hi > b.lo)) throw PreconditionError("empty bin configuration");
  const Manifold& x = path.manifold();
  const auto u = path.potential(t[0], t[1]);
  EmpiricalMeasure mu;
  mu.dimension = k;
  mu.bins = bins;
  std::vector<double> a, b, mass;
  if (k == 1) {
    const auto v = path.velocity(t[0], t[1]);
    if (const auto* tor = std::get_if<Torus>(&x)) {
      const auto dd = torus::ddbar(*tor, u);
      mass.resize(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) mass[i] = tor->cell_form_area() * (tor->density()[i] + dd[i]);
      a = v;
      b = v;
    } else if (const auto* c = std::get_if<Cp1>(&x)) {
      const auto cum = *cp1::metric_of(*c, u).cumulative;
      const std::size_t n = c->cells();
      mass.resize(n);
      a.resize(n);
      b.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        mass[j] = two_pi * (cum[j + 1] - cum[j]);
        a[j] = v[j];
        b[j] = v[j + 1];
      }
    } else {
      const auto& p = std::get<Cp1Product>(x);
      mass = product_cell_masses(p, u);
      const std::size_t n = p.side();
      a.resize(mass.size());
      b.resize(mass.size());
      for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const double c4[4] = {v[i + n * j], v[i + 1 + n * j], v[i + n * (j + 1)], v[i + 1 + n * (j + 1)]};
          a[i + (n - 1) * j] = *std::min_element(c4, c4 + 4);
          b[i + (n - 1) * j] = *std::max_element(c4, c4 + 4);
        }
    }
    require_positive_masses(mass);
    const kernels::IntervalDeposit dep{a, b, mass};
    mu.weights = use_parallel ? kernels::parallel::deposit(dep, bins[0]) : kernels::serial::deposit(dep, bins[0]);
  } else {
    const auto* p = std::get_if<Cp1Product>(&x);
    if (!p) throw PreconditionError("two-parameter pushforwards live on the product backend");
    const auto v1 = path.velocity(t[0], t[1], 0), v2 = path.velocity(t[0], t[1], 1);
    mass = product_cell_masses(*p, u);
    require_positive_masses(mass);
    const std::size_t n = p->side();
    std::vector<double> a1(mass.size()), b1(mass.size()), a2(mass.size()), b2(mass.size());
    for (std::size_t j = 0; j + 1 < n; ++j)
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t c[4] = {i + n * j, i + 1 + n * j, i + n * (j + 1), i + 1 + n * (j + 1)};
        const std::size_t cell = i + (n - 1) * j;
        a1[cell] = b1[cell] = v1[c[0]];
        a2[cell] = b2[cell] = v2[c[0]];
        for (int q = 1; q < 4; ++q) {
          a1[cell] = std::min(a1[cell], v1[c[q]]);
          b1[cell] = std::max(b1[cell], v1[c[q]]);
          a2[cell] = std::min(a2[cell], v2[c[q]]);
          b2[cell] = std::max(b2[cell], v2[c[q]]);
        }
      }
    const kernels::BoxDeposit dep{a1, b1, a2, b2, mass};
    mu.weights = use_parallel ? kernels::parallel::deposit(dep, bins[0], bins[1])
                              : kernels::serial::deposit(dep, bins[0], bins[1]);
  }
  mu.total = std::accumulate(mass.begin(), mass.end(), 0.0);
  return mu;
}

EmpiricalMeasure uniform_measure(const std::vector<BinSpec>& bins, double total) {
  EmpiricalMeasure mu;
  mu.dimension = static_cast<int>(bins.size());
  mu.bins = bins;
  mu.total = total;
  if (mu.dimension == 1) {
    mu.weights.assign(bins[0].count, total / bins[0].count);
  } else {
    mu.weights.assign(static_cast<std::size_t>(bins[0].count) * bins[1].count,
                      total / (static_cast<double>(bins[0].count) * bins[1].count));
  }
  return mu;
}

double measure_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.dimension != b.dimension || a.bins.size() != b.bins.size())
    throw PreconditionError("measures of different dimension");
  for (std::size_t i = 0; i < a.bins.size(); ++i)
    if (!same_bins(a.bins[i], b.bins[i])) throw PreconditionError("measures on incompatible bins");
  const double sa = std::accumulate(a.weights.begin(), a.weights.end(), 0.0);
  const double sb = std::accumulate(b.weights.begin(), b.weights.end(), 0.0);
  if (!(sa > 0.0) || !(sb > 0.0)) throw PreconditionError("measure with no mass");
  if (a.dimension == 1) {
    double fa = 0.0, fb = 0.0, d = 0.0;
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
      fa += a.weights[i] / sa;
      fb += b.weights[i] / sb;
      d = std::max(d, std::abs(fa - fb));
    }
    return d;
  }
  const int n1 = a.bins[0].count, n2 = a.bins[1].count;
  std::vector<Point> centre(a.weights.size());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      centre[i + static_cast<std::size_t>(n1) * j] = {a.bins[0].edge(i) + 0.5 * a.bins[0].width(),
                                                      a.bins[1].edge(j) + 0.5 * a.bins[1].width()};
  const double scale = std::max({std::abs(a.bins[0].lo), std::abs(a.bins[0].hi), std::abs(a.bins[1].lo),
                                 std::abs(a.bins[1].hi)});
  std::vector<double> worst(16, 0.0);
  parallel_for(16, [&](std::ptrdiff_t k) {
    const double th = pi * static_cast<double>(k) / 16.0;
    const double c = std::cos(th), s = std::sin(th);
    std::vector<std::pair<double, std::size_t>> proj(centre.size());
    for (std::size_t q = 0; q < centre.size(); ++q) proj[q] = {c * centre[q][0] + s * centre[q][1], q};
    std::sort(proj.begin(), proj.end());
    double fa = 0.0, fb = 0.0, d = 0.0;
    for (std::size_t q = 0; q < proj.size(); ++q) {
      fa += a.weights[proj[q].second] / sa;
      fb += b.weights[proj[q].second] / sb;
      // Compare only at the end of a group of equal projections.
      const bool group_end = q + 1 == proj.size() || proj[q + 1].first - proj[q].first > 1e-12 * scale;
      if (group_end) d = std::max(d, std::abs(fa - fb));
    }
    worst[k] = d;
  });
  return *std::max_element(worst.begin(), worst.end());
}

// ---------------------------------------------------------------------------
// Hulls and range sets

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double distance_to_hull(const std::vector<Point>& hull, Point p) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return std::hypot(p[0] - hull[0][0], p[1] - hull[0][1]);
  if (hull.size() == 2) return segment_distance(p, hull[0], hull[1]);
  bool inside = true;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < 0.0) inside = false;
    d = std::min(d, segment_distance(p, a, b));
  }
  return inside ? 0.0 : d;
}

namespace {

// Largest distance from a sample of the hull (interior lattice plus boundary)
// to the nearest cloud point, using a uniform grid hash of the cloud.
double coverage(const std::vector<Point>& cloud, const std::vector<Point>& hull, double s) {
  if (cloud.empty() || hull.empty()) return 0.0;
  struct Key {
    long long i, j;
    bool operator==(const Key& o) const { return i == o.i && j == o.j; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<long long>()(k.i * 1000003LL) ^ std::hash<long long>()(k.j);
    }
  };
  double lo0 = hull[0][0], hi0 = lo0, lo1 = hull[0][1], hi1 = lo1;
  for (const auto& v : hull) {
    lo0 = std::min(lo0, v[0]), hi0 = std::max(hi0, v[0]);
    lo1 = std::min(lo1, v[1]), hi1 = std::max(hi1, v[1]);
  }
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> grid;
  auto key = [&](const Point& p) {
    return Key{static_cast<long long>(std::floor((p[0] - lo0) / s)), static_cast<long long>(std::floor((p[1] - lo1) / s))};
  };
  for (std::size_t q = 0; q < cloud.size(); ++q) grid[key(cloud[q])].push_back(q);
  auto nearest = [&](const Point& p) {
    const Key k = key(p);
    double best = std::numeric_limits<double>::infinity();
    for (long long r = 0;; ++r) {
      for (long long di = -r; di <= r; ++di)
        for (long long dj = -r; dj <= r; ++dj) {
          if (std::max(std::abs(di), std::abs(dj)) != r) continue;
          const auto it = grid.find(Key{k.i + di, k.j + dj});
          if (it == grid.end()) continue;
          for (std::size_t q : it->second)
            best = std::min(best, std::hypot(p[0] - cloud[q][0], p[1] - cloud[q][1]));
        }
      // Every point outside ring r is at least r s away.
      if (best <= r * s) return best;
    }
  };
  std::vector<Point> sample(hull);
  for (std::size_t i = 0; i < hull.size() && hull.size() > 1; ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    const int steps = static_cast<int>(std::ceil(std::hypot(b[0] - a[0], b[1] - a[1]) / s));
    for (int q = 1; q < steps; ++q) {
      const double f = static_cast<double>(q) / steps;
      sample.push_back({a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])});
    }
  }
  const long long n0 = static_cast<long long>(std::floor((hi0 - lo0) / s)) + 1;
  const long long n1 = static_cast<long long>(std::floor((hi1 - lo1) / s)) + 1;
  for (long long j = 0; j < n1; ++j)
    for (long long i = 0; i < n0; ++i) {
      const Point p{lo0 + i * s, lo1 + j * s};
      if (hull.size() >= 3 && distance_to_hull(hull, p) == 0.0) sample.push_back(p);
    }
  std::vector<double> worst(sample.size());
  parallel_for(static_cast<std::ptrdiff_t>(sample.size()), [&](std::ptrdiff_t q) { worst[q] = nearest(sample[q]); });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace

RangeSet interval_set(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  RangeSet r;
  r.dimension = 1;
  r.lo = lo;
  r.hi = hi;
  return r;
}

RangeSet cloud_set(std::vector<Point> points, std::optional<double> coverage_spacing) {
  RangeSet r;
  r.dimension = 2;
  r.points = std::move(points);
  r.hull = convex_hull(r.points);
  double defect = 0.0;
  for (const auto& p : r.points) defect = std::max(defect, distance_to_hull(r.hull, p));
  r.hull_defect = defect;
  if (coverage_spacing) r.coverage_defect = coverage(r.points, r.hull, *coverage_spacing);
  return r;
}

RangeSet set_A(const GeodesicPath& path, std::array<double, 2> t, std::optional<double> coverage_spacing) {
  if (path.time_dimension() == 1) {
    const auto v = path.velocity(t[0]);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return interval_set(*lo, *hi);
  }
  const auto v1 = path.velocity(t[0], t[1], 0), v2 = path.velocity(t[0], t[1], 1);
  std::vector<Point> cloud(v1.size());
  for (std::size_t k = 0; k < cloud.size(); ++k) cloud[k] = {v1[k], v2[k]};
  return cloud_set(std::move(cloud), coverage_spacing);
}

std::vector<RangeSet> set_B(const GeodesicPath& path, const std::vector<std::size_t>& nodes,
                            const std::vector<TimeGrid>& times) {
  const int k = path.time_dimension();
  if (static_cast<int>(times.size()) != k) throw PreconditionError("one time grid per time dimension");
  const int n1 = times[0].count, n2 = k == 2 ? times[1].count : 1;
  const std::size_t samples = static_cast<std::size_t>(n1) * n2;
  std::vector<std::vector<Point>> traj(nodes.size(), std::vector<Point>(samples));
  parallel_for(static_cast<std::ptrdiff_t>(samples), [&](std::ptrdiff_t s) {
    const double t1 = times[0].at(static_cast<int>(s % n1));
    const double t2 = k == 2 ? times[1].at(static_cast<int>(s / n1)) : 0.0;
    const auto v1 = path.velocity(t1, t2, 0);
    const auto v2 = k == 2 ? path.velocity(t1, t2, 1) : std::vector<double>{};
    for (std::size_t q = 0; q < nodes.size(); ++q) traj[q][s] = {v1.at(nodes[q]), k == 2 ? v2[nodes[q]] : 0.0};
  });
  std::vector<RangeSet> out;
  out.reserve(nodes.size());
  for (auto& tr : traj) {
    if (k == 1) {
      double lo = tr[0][0], hi = lo;
      for (const auto& p : tr) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
      out.push_back(interval_set(lo, hi));
    } else {
      out.push_back(cloud_set(std::move(tr)));
    }
  }
  return out;
}

RangeSet set_B(const GeodesicPath& path, std::size_t node, const std::vector<TimeGrid>& times,
               std::optional<std::array<double, 2>> limits) {
  RangeSet r = set_B(path, std::vector<std::size_t>{node}, times).front();
  if (limits && r.dimension == 1) r = interval_set(std::min(r.lo, (*limits)[0]), std::max(r.hi, (*limits)[1]));
  return r;
}

double hausdorff(const RangeSet& a, const RangeSet& b) {
  if (a.dimension != b.dimension) throw PreconditionError("Hausdorff distance between sets of different dimension");
  if (a.dimension == 1) return std::max(std::abs(a.lo - b.lo), std::abs(a.hi - b.hi));
  // For convex sets the farthest point of one from the other is a vertex.
  double d = 0.0;
  for (const auto& p : a.hull) d = std::max(d, distance_to_hull(b.hull, p));
  for (const auto& p : b.hull) d = std::max(d, distance_to_hull(a.hull, p));
  return d;
}

// ---------------------------------------------------------------------------
// Moment images

MomentImage moment_image(const Cp1Dilation& v, const Cp1& x, int stride) {
  const auto h = flows::hamiltonian(v, x, flows::reference(x));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t j = 0; j < h.size(); ++j)
    if (j % stride == 0 || j + 1 == h.size()) lo = std::min(lo, h[j]), hi = std::max(hi, h[j]);
  MomentImage m;
  m.image = interval_set(lo, hi);
  m.gauge = {-h.front(), 0.0};
  return m;
}

MomentImage moment_image(const ProductDilation& v, const Cp1Product& x, int stride,
                         std::optional<double> coverage_spacing) {
  const auto h = flows::hamiltonian(v, x);
  const std::size_t n = x.side();
  std::vector<Point> cloud;
  for (std::size_t j = 0; j < n; ++j) {
    if (j % stride != 0 && j + 1 != n) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (i % stride == 0 || i + 1 == n) cloud.push_back({h[0][i + n * j], h[1][i + n * j]});
  }
  MomentImage m;
  m.image = cloud_set(std::move(cloud), coverage_spacing);
  m.gauge = {-h[0].front(), -h[1].front()};
  return m;
}

}  // namespace kahler
