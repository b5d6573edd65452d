#pragma once

#include <array>
#include <span>
#include <vector>

namespace kahler {

/// Dense polynomial sum_k c[k] m^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  /// m^2 (1-m)^2, the standard smooth bump vanishing to second order at 0 and 1.
  static Polynomial bump();
  static Polynomial affine(double c0, double c1);

  double operator()(double m) const;
  Polynomial derivative() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(double s) const;

  /// Largest |coefficient| of degree >= 2.
  double nonaffine_size() const;
  const std::vector<double>& coeffs() const noexcept { return c_; }

 private:
  std::vector<double> c_;
};

/// Second-order Taylor jet (value, first, second derivative).
struct Jet2 {
  double v = 0.0, d1 = 0.0, d2 = 0.0;

  static Jet2 constant(double c) { return {c, 0.0, 0.0}; }
  static Jet2 variable(double x) { return {x, 1.0, 0.0}; }

  friend Jet2 operator+(Jet2 a, Jet2 b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
  friend Jet2 operator-(Jet2 a, Jet2 b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
  friend Jet2 operator*(Jet2 a, Jet2 b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
  }
  friend Jet2 operator/(Jet2 a, Jet2 b) {
    const double q = a.v / b.v;
    const double q1 = (a.d1 - q * b.d1) / b.v;
    const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
    return {q, q1, q2};
  }
};

/// Composite fourth-order quadrature weights on n+1 uniform nodes of spacing h.
/// Exact for cubics; needs n >= 3.
std::vector<double> quadrature_weights(int n, double h);

/// Diagonal norm of the (2,4) summation-by-parts pair: a quadrature exact
/// for cubics whose weights equal h away from the ends.  Needs n >= 8.
std::vector<double> sbp_weights(int n, double h);
/// First derivative paired with sbp_weights: fourth order inside, second order
/// in the four end rows, and sum_j q_j (D f)_j = f_n - f_0 exactly.
std::vector<double> sbp_derivative(std::span<const double> f, double h);

/// Running integral F[j] = int_{x_0}^{x_j} f with the cubic-interpolation rule.
std::vector<double> cumulative_integral(std::span<const double> f, double h);

/// Cubic Lagrange interpolation on uniform nodes x_j = j h, j = 0..n.
double interpolate_cubic(std::span<const double> f, double h, double x);

/// Five-point (once Richardson-extrapolated central) first derivative from samples at
/// t-2h, t-h, t+h, t+2h.
inline double five_point_d1(double fm2, double fm1, double fp1, double fp2, double h) {
  return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}
/// Five-point second derivative.
inline double five_point_d2(double fm2, double fm1, double f0, double fp1, double fp2, double h) {
  return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
}

/// Least-squares line fit y = a + b x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;  ///< root-mean-square residual of the fit
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Observed convergence order: slope of -log(err) against log(resolution).
LineFit convergence_order(std::span<const double> resolution, std::span<const double> error);

/// Gauss-Legendre nodes/weights on [0,1] (3 points, exact through degree 5).
inline constexpr std::array<double, 3> gl3_nodes = {0.1127016653792583, 0.5, 0.8872983346207417};
inline constexpr std::array<double, 3> gl3_weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace kahler
