#pragma once

#include "kahler/numeric.hpp"

namespace kahler {

/// Point of the moment interval carried together with its complement, so that
/// values near m = 1 keep full relative precision.
struct MomentPoint {
  double m = 0.0;
  double one_minus_m = 1.0;
  double logit = 0.0;  ///< s-part log(m/(1-m)); infinite at the poles
};

/// S^1-invariant symplectic potential on CP^1 in Guillemin form
///   w(m) = m log m + (1-m) log(1-m) + p(m),   p a polynomial.
/// The Fubini-Study potential is p = 0; its Kaehler form is i ddbar log(1+|z|^2)
/// with area 2 pi.
class SymplecticPotential {
 public:
  SymplecticPotential() = default;
  explicit SymplecticPotential(Polynomial smooth_part);

  static SymplecticPotential fubini_study() { return SymplecticPotential(); }

  const Polynomial& smooth_part() const noexcept { return p_; }
  SymplecticPotential plus(const Polynomial& dp) const;
  /// (1-t) w0 + t w1; both share the Guillemin model so only p interpolates.
  static SymplecticPotential interpolate(const SymplecticPotential& w0,
                                         const SymplecticPotential& w1, double t);

  double value(double m) const;
  /// w'(m) = log(m/(1-m)) + p'(m), i.e. the log-coordinate s of the point m.
  double slope(double m) const;
  /// D(m) = 1/w''(m) with its first two derivatives; D vanishes at 0 and 1
  /// with D'(0) = 1, D'(1) = -1.
  Jet2 reduced_density(double m) const;
  /// Scalar curvature -D''(m) (Fubini-Study: 2).
  double scalar_curvature(double m) const { return -reduced_density(m).d2; }

  /// Inverse of the slope map: the m with w'(m) = s.  Newton in the logit
  /// variable, safeguarded by bisection.
  MomentPoint moment_of(double s) const;

  /// Smallest value of 1 + m(1-m) p''(m) on a dense scan of (0,1); positive iff
  /// w is strictly convex.
  double convexity_margin(int samples = 4096) const;

 private:
  Polynomial p_;
  Polynomial dp_;
  Polynomial d2p_;
};

}  // namespace kahler
