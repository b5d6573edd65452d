#pragma once

#include <array>
#include <complex>
#include <variant>
#include <vector>

#include "kahler/cp1.hpp"
#include "kahler/torus.hpp"

namespace kahler {

/// V = c d/dz on the torus.
struct TorusTranslation {
  cplx c{1.0, 0.0};
};
/// V = a z d/dz on CP^1 (rotation/dilation about the poles z = 0, infinity).
struct Cp1Dilation {
  cplx a{1.0, 0.0};
};
/// (a1 z1 d/dz1, a2 z2 d/dz2) on CP^1 x CP^1; the members commute.
struct ProductDilation {
  cplx a1{1.0, 0.0};
  cplx a2{1.0, 0.0};
};

/// Holomorphic vector fields with closed-form flows.
using HoloField = std::variant<TorusTranslation, Cp1Dilation, ProductDilation>;

/// Time-tau flow of a field, F_tau = exp(tau V).
class FlowMap {
 public:
  FlowMap(HoloField field, cplx tau) : field_(field), tau_(tau) {}

  const HoloField& field() const noexcept { return field_; }
  cplx time() const noexcept { return tau_; }
  /// F_tau o F_sigma for flows of the same field.
  FlowMap then(const FlowMap& inner) const;

  /// Torus point map (x1, x2) -> (x1, x2) + (Re c tau, Im c tau) mod 1.
  std::array<double, 2> apply(double x1, double x2) const;
  /// CP^1 map on the moment coordinate of w: |z|^2 scales by exp(2 Re(a tau)).
  MomentPoint apply(const SymplecticPotential& w, double m) const;
  /// Shift of s = log|z|^2 (per factor for products).
  double log_shift(int factor = 0) const;

 private:
  HoloField field_;
  cplx tau_;
};

/// Exact closed-form flow; no numerical integration.
FlowMap flow(const HoloField& v, cplx tau);

namespace flows {

/// F*omega on the torus: density xi(F(x)) (the Jacobian of a translation is 1).
std::vector<double> pullback(const FlowMap& f, const Torus& x);
/// F*omega on CP^1 as a ratio to omega, with exact cumulative mass F(m).
Cp1Density pullback(const FlowMap& f, const Cp1& x);
/// Pullback of omega under the map s -> s + shift of the cp1 log-coordinate.
Cp1Density pullback_shift(const Cp1& x, double shift);
/// Factor pullbacks of the product form.
std::array<Cp1Density, 2> pullback(const FlowMap& f, const Cp1Product& x);

/// V -| omega = i b dz-bar on the torus: b = g c for omega = g i dz^dz-bar.
std::vector<cplx> contract(const TorusTranslation& v, const Torus& x, const std::vector<double>& g);
/// V -| omega = i b dz-bar/z-bar on CP^1 (reduced): b = a D ratio.
std::vector<cplx> contract(const Cp1Dilation& v, const Cp1& x, const Cp1Density& omega);

/// Outcome of the dbar-exactness test V -| omega = i dbar h.
struct Exactness {
  bool exact = false;
  std::vector<cplx> h;       ///< mean-zero potential when exact
  double obstruction = 0.0;  ///< |harmonic part| of V -| omega
};

Exactness exactness_check(const TorusTranslation& v, const Torus& x, const std::vector<double>& g,
                          double tol = 1e-10);
Exactness exactness_check(const Cp1Dilation& v, const Cp1& x, const Cp1Density& omega,
                          double tol = 1e-10);

/// Real H with (V - V-bar) -| omega = i dH, mean zero against omega.
/// Throws ObstructionError when Im V is not Hamiltonian.
std::vector<double> hamiltonian(const TorusTranslation& v, const Torus& x, const std::vector<double>& g,
                                double tol = 1e-10);
std::vector<double> hamiltonian(const Cp1Dilation& v, const Cp1& x, const Cp1Density& omega,
                                double tol = 1e-10);
/// Hamiltonians of both members of a product tuple, on the product grid.
std::array<std::vector<double>, 2> hamiltonian(const ProductDilation& v, const Cp1Product& x,
                                               double tol = 1e-10);

/// Reference form of the backend.
Cp1Density reference(const Cp1& x);

}  // namespace flows
}  // namespace kahler
