#include "kahler/metric_superposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kahler/error.hpp"
#include "kahler/kernels.hpp"
#include "kahler/parallel.hpp"

namespace kahler {

namespace {

constexpr double d1_6[7] = {-1.0 / 60, 9.0 / 60, -45.0 / 60, 0.0, 45.0 / 60, -9.0 / 60, 1.0 / 60};
constexpr double d2_6[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
constexpr double inf = std::numeric_limits<double>::infinity();

// Sixth-order derivatives at the scored nodes: (g_x, g_y, Delta g).
struct Derivs {
  std::vector<double> gx, gy, delta;
};

Derivs derivatives(const ConformalMetric& m, const std::vector<double>& scored) {
  const int n = m.grid.n;
  const double h = m.grid.h;
  Derivs d{std::vector<double>(m.g.size(), 0.0), std::vector<double>(m.g.size(), 0.0),
           std::vector<double>(m.g.size(), 0.0)};
  parallel_for(n, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < n; ++i) {
      const std::size_t k = i + static_cast<std::size_t>(n) * j;
      if (!std::isfinite(scored[k])) continue;
      double gx = 0, gy = 0, lap = 0;
      for (int r = -3; r <= 3; ++r) {
        const double a = m.g[(i + r) + static_cast<std::size_t>(n) * j];
        const double b = m.g[i + static_cast<std::size_t>(n) * (j + r)];
        gx += d1_6[r + 3] * a;
        gy += d1_6[r + 3] * b;
        lap += d2_6[r + 3] * (a + b);
      }
      d.gx[k] = gx / h;
      d.gy[k] = gy / h;
      d.delta[k] = 0.25 * lap / (h * h);
    }
  });
  return d;
}

double min_finite(const std::vector<double>& v) {
  double m = inf;
  for (double x : v)
    if (std::isfinite(x)) m = std::min(m, x);
  return m;
}

}  // namespace

bool DomainGrid::same_as(const DomainGrid& o) const noexcept {
  return n == o.n && h == o.h && x0 == o.x0 && y0 == o.y0 && margin == o.margin && mask == o.mask;
}

DomainGrid disk_grid(int n, double radius) {
  if (n < 16 || !(radius > 0.0)) throw PreconditionError("disk grid needs n >= 16 and a positive radius");
  DomainGrid g;
  g.n = n;
  g.h = 2.0 * radius / (n - 1);
  g.x0 = g.y0 = -radius;
  g.mask.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g.mask[i + static_cast<std::size_t>(n) * j] = std::hypot(g.x(i), g.y(j)) < radius;
  return g;
}

DomainGrid strip_grid(int n, double a, double length) {
  if (n < 16 || !(length > 0.0)) throw PreconditionError("strip grid needs n >= 16 and a positive width");
  DomainGrid g;
  g.n = n;
  g.h = length / (n - 1);
  g.x0 = a;
  g.y0 = -0.5 * length;
  g.mask.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g.mask[i + static_cast<std::size_t>(n) * j] = i > 0 && i < n - 1;
  return g;
}

ConformalMetric metric_from(const DomainGrid& grid, const std::function<double(double, double)>& f) {
  ConformalMetric m{grid, std::vector<double>(grid.mask.size(), 1.0)};
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const std::size_t k = i + static_cast<std::size_t>(grid.n) * j;
      if (!grid.mask[k]) continue;
      m.g[k] = f(grid.x(i), grid.y(j));
      if (!(m.g[k] > 0.0) || !std::isfinite(m.g[k])) {
        std::ostringstream os;
        os << "conformal density not positive at (" << grid.x(i) << ", " << grid.y(j) << ")";
        throw PositivityError(os.str(), static_cast<double>(k));
      }
    }
  return m;
}

ConformalMetric scaled_poincare(const DomainGrid& grid, double c, std::complex<double> p, double rho) {
  if (!(c > 0.0) || !(rho > 0.0)) throw PreconditionError("scaled Poincare metric needs c > 0 and rho > 0");
  return metric_from(grid, [=](double x, double y) {
    const double r2 = std::norm(std::complex<double>(x, y) - p);
    const double q = rho * rho - r2;
    if (!(q > 0.0)) throw PreconditionError("the Poincare disk must contain the domain");
    return c * 4.0 * rho * rho / (q * q);
  });
}

MarginField curvature_margin(const ConformalMetric& m, double a, bool use_parallel) {
  std::vector<double> lg(m.g.size());
  for (std::size_t k = 0; k < lg.size(); ++k) lg[k] = std::log(m.g[k]);
  const kernels::DiskMargin d{lg, m.g, m.grid.n, m.grid.h, a, m.grid.margin, m.grid.mask};
  MarginField f;
  f.margin = use_parallel ? kernels::parallel::disk_margin(d) : kernels::serial::disk_margin(d);
  f.min = min_finite(f.margin);
  if (!std::isfinite(f.min)) throw PreconditionError("no interior nodes to score");
  return f;
}

ConformalMetric superpose(const std::vector<ConformalMetric>& family, const std::vector<double>& nu) {
  if (family.empty() || family.size() != nu.size()) throw PreconditionError("one weight per family member");
  ConformalMetric out{family.front().grid, std::vector<double>(family.front().g.size(), 0.0)};
  for (std::size_t a = 0; a < family.size(); ++a) {
    if (!family[a].grid.same_as(out.grid)) throw PreconditionError("family members live on different grids");
    if (!(nu[a] >= 0.0)) throw PreconditionError("superposition weights must be nonnegative");
    for (std::size_t k = 0; k < out.g.size(); ++k) out.g[k] += nu[a] * family[a].g[k];
  }
  return out;
}

PropCheck prop_check(const std::vector<ConformalMetric>& family, const std::vector<double>& nu, double a,
                     double tol) {
  PropCheck r;
  const ConformalMetric g = superpose(family, nu);
  for (double w : nu) r.mass += w;
  if (!(r.mass > 0.0)) throw PreconditionError("superposition weights have no mass");
  for (std::size_t m = 0; m < family.size(); ++m) {
    const double mm = curvature_margin(family[m], a).min;
    r.member_margins.push_back(mm);
    if (mm < -tol) {
      std::ostringstream os;
      os << "family member " << m << " has curvature margin " << mm << " at a = " << a;
      throw PreconditionError(os.str());
    }
  }
  const auto field = curvature_margin(g, a / r.mass);
  r.margin = field.min;

  const auto dg = derivatives(g, field.margin);
  const std::size_t nodes = g.g.size();
  std::vector<double> grad_sum(nodes, 0.0), sq_sum(nodes, 0.0), identity(nodes, inf);
  for (std::size_t m = 0; m < family.size(); ++m) {
    const auto& gm = family[m].g;
    const auto d = derivatives(family[m], field.margin);
    for (std::size_t k = 0; k < nodes; ++k) {
      if (!std::isfinite(field.margin[k])) continue;
      // |dg|^2 = |g_x - i g_y|^2 / 4.
      const double grad2 = 0.25 * (d.gx[k] * d.gx[k] + d.gy[k] * d.gy[k]);
      // g (Delta log g - a g), scaled by g^2 so node magnitudes are comparable.
      identity[k] = std::min(identity[k], (d.delta[k] - a * gm[k] * gm[k] - grad2 / gm[k]) / (gm[k] * gm[k]));
      grad_sum[k] += nu[m] * grad2 / gm[k];
      sq_sum[k] += nu[m] * gm[k] * gm[k];
    }
  }
  std::vector<double> cg(nodes, inf), cm(nodes, inf);
  for (std::size_t k = 0; k < nodes; ++k) {
    if (!std::isfinite(field.margin[k])) continue;
    const double grad2 = 0.25 * (dg.gx[k] * dg.gx[k] + dg.gy[k] * dg.gy[k]);
    cg[k] = g.g[k] * grad_sum[k] - grad2;
    cm[k] = r.mass * sq_sum[k] - g.g[k] * g.g[k];
  }
  r.member_identity = min_finite(identity);
  r.cauchy_gradient = min_finite(cg);
  r.cauchy_mass = min_finite(cm);
  return r;
}

}  // namespace kahler
