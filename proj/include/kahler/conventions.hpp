#pragma once

/// Normalizations shared by every module.
///
/// Forms
///   i dz^dz-bar = 2 dx^dy.  A Kaehler form on a Riemann surface is written
///   omega = g i dz^dz-bar, so its area density against dx dy is 2g, and
///   omega^n/n! on a product is the wedge of the factor forms.
///
/// Derivatives
///   d/dz = (d/dx - i d/dy)/2,  d/dz-bar = (d/dx + i d/dy)/2,
///   i ddbar u = u_{z zbar} i dz^dz-bar with u_{z zbar} = Laplacian(u)/4.
///   |b dz-bar|^2 measured by omega = g i dz^dz-bar is |b|^2/g.
///
/// Time
///   Paths are functions of real time t = Re(tau) only.  The factor table
///   d/dtau = d/dt / 2   and   d^2/dtau dtau-bar = d^2/dt^2 / 4
///   turns every complex-time quantity into a real-time one.  In particular
///   the geodesic residual is c(u) = (u_tt - |dbar u_t|^2_t)/4 and the
///   Theta density of the K-energy is kappa = K_tt/4.
///
/// Curvature of a conformal metric g |dtau|^2
///   "curvature <= -a" means Delta log g >= a g with Delta = d^2/dtau dtau-bar,
///   i.e. (1/4)(d_xx + d_yy) log g >= a g.  The hyperbolic density with
///   Delta log lambda = lambda is the reference metric of curvature -1.
///
/// S^1-invariant CP^1
///   Points are labelled by the moment coordinate m = phi'(s) in [0,1] of the
///   reference potential phi(s), s = log|z|^2.  D(m) = 1/w''(m) is the density
///   of omega against ds dtheta; omega itself is 2pi dm after the angle is
///   integrated out.  (1,1)-forms are stored as their ratio to omega.

#include <numbers>

namespace kahler {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Area of i dz^dz-bar against dx dy.
inline constexpr double idzdzbar_area = 2.0;

/// Relative tolerance for compatibility (zero total mass) and positivity checks.
inline constexpr double default_rel_tol = 1e-8;

}  // namespace kahler
