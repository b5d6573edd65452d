#include "kahler/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kahler {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

Polynomial Polynomial::bump() { return Polynomial({0.0, 0.0, 1.0, -2.0, 1.0}); }

Polynomial Polynomial::affine(double c0, double c1) { return Polynomial({c0, c1}); }

double Polynomial::operator()(double m) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * m + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> r(c_);
  for (auto& x : r) x *= s;
  return Polynomial(std::move(r));
}

double Polynomial::nonaffine_size() const {
  double s = 0.0;
  for (std::size_t k = 2; k < c_.size(); ++k) s = std::max(s, std::abs(c_[k]));
  return s;
}

namespace {

// int_{x_j}^{x_{j+1}} of the cubic through nodes j-1..j+2 (one-sided at the ends):
// the integral is h/24 * sum_k coef[k] f[first + k].
struct IntervalRule {
  std::size_t first;
  std::array<double, 4> coef;
};

IntervalRule interval_rule(std::size_t n, std::size_t j) {
  if (j == 0) return {0, {9.0, 19.0, -5.0, 1.0}};
  if (j == n - 1) return {n - 3, {1.0, -5.0, 19.0, 9.0}};
  return {j - 1, {-1.0, 13.0, 13.0, -1.0}};
}

double interval_integral(std::span<const double> f, std::size_t j, double h) {
  const auto rule = interval_rule(f.size() - 1, j);
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) acc += rule.coef[k] * f[rule.first + k];
  return h / 24.0 * acc;
}

}  // namespace

std::vector<double> quadrature_weights(int n, double h) {
  if (n < 3) throw std::invalid_argument("quadrature_weights: need at least 4 nodes");
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> w(nn + 1, 0.0);
  for (std::size_t j = 0; j < nn; ++j) {
    const auto rule = interval_rule(nn, j);
    for (std::size_t k = 0; k < 4; ++k) w[rule.first + k] += h / 24.0 * rule.coef[k];
  }
  return w;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h) {
  if (f.size() < 4) throw std::invalid_argument("cumulative_integral: need at least 4 nodes");
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t j = 0; j + 1 < f.size(); ++j) out[j + 1] = out[j] + interval_integral(f, j, h);
  return out;
}

double interpolate_cubic(std::span<const double> f, double h, double x) {
  const int n = static_cast<int>(f.size()) - 1;
  const double u = x / h;
  int j = static_cast<int>(std::floor(u)) - 1;
  j = std::clamp(j, 0, n - 3);
  const double r = u - j;  // position relative to node j, in [.., ..]
  const double l0 = -(r - 1) * (r - 2) * (r - 3) / 6.0;
  const double l1 = r * (r - 2) * (r - 3) / 2.0;
  const double l2 = -r * (r - 1) * (r - 3) / 2.0;
  const double l3 = r * (r - 1) * (r - 2) / 6.0;
  const auto jj = static_cast<std::size_t>(j);
  return l0 * f[jj] + l1 * f[jj + 1] + l2 * f[jj + 2] + l3 * f[jj + 3];
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

LineFit convergence_order(std::span<const double> resolution, std::span<const double> error) {
  std::vector<double> lx(resolution.size()), ly(error.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    lx[i] = std::log(resolution[i]);
    ly[i] = -std::log(std::max(error[i], 1e-300));
  }
  return fit_line(lx, ly);
}

namespace {

constexpr std::array<double, 4> sbp_norm = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
constexpr std::array<std::array<double, 6>, 4> sbp_rows = {{
    {-24.0 / 17, 59.0 / 34, -4.0 / 17, -3.0 / 34, 0.0, 0.0},
    {-0.5, 0.0, 0.5, 0.0, 0.0, 0.0},
    {4.0 / 43, -59.0 / 86, 0.0, 59.0 / 86, -4.0 / 43, 0.0},
    {3.0 / 98, 0.0, -59.0 / 98, 0.0, 32.0 / 49, -4.0 / 49},
}};

}  // namespace

std::vector<double> sbp_weights(int n, double h) {
  if (n < 8) throw std::invalid_argument("sbp_weights: need at least 9 nodes");
  std::vector<double> q(static_cast<std::size_t>(n) + 1, h);
  for (std::size_t k = 0; k < 4; ++k) {
    q[k] = sbp_norm[k] * h;
    q[n - k] = sbp_norm[k] * h;
  }
  return q;
}

std::vector<double> sbp_derivative(std::span<const double> f, double h) {
  const std::size_t len = f.size();
  if (len < 9) throw std::invalid_argument("sbp_derivative: need at least 9 nodes");
  const std::size_t n = len - 1;
  std::vector<double> d(len);
  for (std::size_t i = 0; i < 4; ++i) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
      lo += sbp_rows[i][k] * f[k];
      hi -= sbp_rows[i][k] * f[n - k];
    }
    d[i] = lo / h;
    d[n - i] = hi / h;
  }
  for (std::size_t i = 4; i + 4 <= n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
  return d;
}

}  // namespace kahler
