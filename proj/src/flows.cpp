#include "kahler/flows.hpp"

#include <cmath>
#include <sstream>

#include "kahler/error.hpp"

namespace kahler {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wrap_unit(double x) { return x - std::floor(x); }

}  // namespace

FlowMap flow(const HoloField& v, cplx tau) { return FlowMap(v, tau); }

FlowMap FlowMap::then(const FlowMap& inner) const {
  if (field_.index() != inner.field_.index()) throw PreconditionError("composing flows of different fields");
  return FlowMap(field_, tau_ + inner.tau_);
}

std::array<double, 2> FlowMap::apply(double x1, double x2) const {
  const auto* t = std::get_if<TorusTranslation>(&field_);
  if (!t) throw PreconditionError("torus point map requested for a non-torus field");
  const cplx shift = t->c * tau_;
  return {wrap_unit(x1 + shift.real()), wrap_unit(x2 + shift.imag())};
}

double FlowMap::log_shift(int factor) const {
  return std::visit(overloaded{
                        [&](const TorusTranslation&) -> double {
                          throw PreconditionError("log shift requested for a torus field");
                        },
                        [&](const Cp1Dilation& d) { return 2.0 * (d.a * tau_).real(); },
                        [&](const ProductDilation& d) {
                          return 2.0 * ((factor == 0 ? d.a1 : d.a2) * tau_).real();
                        },
                    },
                    field_);
}

MomentPoint FlowMap::apply(const SymplecticPotential& w, double m) const {
  if (m <= 0.0) return {0.0, 1.0, -INFINITY};
  if (m >= 1.0) return {1.0, 0.0, INFINITY};
  return w.moment_of(w.slope(m) + log_shift());
}

namespace flows {

Cp1Density reference(const Cp1& x) {
  Cp1Density d;
  d.ratio.assign(x.nodes(), 1.0);
  std::vector<double> c(x.nodes());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = x.coord(j);
  d.cumulative = std::move(c);
  return d;
}

std::vector<double> pullback(const FlowMap& f, const Torus& x) {
  std::vector<double> g(x.nodes());
  const int n = x.size();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const auto p = f.apply(x.coord(i), x.coord(j));
      g[i + static_cast<std::size_t>(n) * j] = x.profile()(p[0], p[1]);
    }
  return g;
}

Cp1Density pullback_shift(const Cp1& x, double shift) {
  Cp1Density d;
  d.ratio.resize(x.nodes());
  std::vector<double> cum(x.nodes());
  const auto& w = x.potential();
  const std::size_t n = x.nodes() - 1;
  for (std::size_t j = 1; j < n; ++j) {
    const MomentPoint p = w.moment_of(x.log_coord(j) + shift);
    cum[j] = p.m;
    d.ratio[j] = w.reduced_density(p.m).v / x.reduced_density()[j];
  }
  cum[0] = 0.0;
  cum[n] = 1.0;
  // |z|^2 -> e^shift |z|^2 near z = 0; the inverse near infinity.
  d.ratio[0] = std::exp(shift);
  d.ratio[n] = std::exp(-shift);
  d.cumulative = std::move(cum);
  return d;
}

Cp1Density pullback(const FlowMap& f, const Cp1& x) {
  if (!std::holds_alternative<Cp1Dilation>(f.field())) throw PreconditionError("cp1 pullback needs a cp1 field");
  return pullback_shift(x, f.log_shift());
}

std::array<Cp1Density, 2> pullback(const FlowMap& f, const Cp1Product& x) {
  if (!std::holds_alternative<ProductDilation>(f.field()))
    throw PreconditionError("product pullback needs a product field");
  return {pullback_shift(x.first(), f.log_shift(0)), pullback_shift(x.second(), f.log_shift(1))};
}

std::vector<cplx> contract(const TorusTranslation& v, const Torus& x, const std::vector<double>& g) {
  if (g.size() != x.nodes()) throw PreconditionError("density does not match the torus grid");
  std::vector<cplx> b(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) b[k] = v.c * g[k];
  return b;
}

std::vector<cplx> contract(const Cp1Dilation& v, const Cp1& x, const Cp1Density& omega) {
  if (omega.ratio.size() != x.nodes()) throw PreconditionError("density does not match the moment grid");
  std::vector<cplx> b(x.nodes());
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = v.a * x.reduced_density()[j] * omega.ratio[j];
  return b;
}

Exactness exactness_check(const TorusTranslation& v, const Torus& x, const std::vector<double>& g,
                          double tol) {
  const auto b = contract(v, x, g);
  Exactness e;
  e.obstruction = std::abs(torus::harmonic_part(x, b));
  e.exact = e.obstruction <= tol;
  if (e.exact) e.h = torus::dbar_solve(x, b);
  return e;
}

Exactness exactness_check(const Cp1Dilation& v, const Cp1& x, const Cp1Density& omega, double) {
  // h' = a * ratio, so h = a * (cumulative mass of m) up to a constant.
  const auto cum = omega.cumulative ? *omega.cumulative
                                    : cumulative_integral(omega.ratio, x.spacing());
  std::vector<double> re(cum);
  const double mean = cp1::omega_mean(x, re);
  Exactness e;
  e.exact = true;
  e.h.resize(cum.size());
  for (std::size_t j = 0; j < cum.size(); ++j) e.h[j] = v.a * (cum[j] - mean);
  return e;
}

namespace {

// Im h must be constant for a real Hamiltonian.
std::vector<double> real_hamiltonian(const std::vector<cplx>& h, double tol) {
  double lo = INFINITY, hi = -INFINITY;
  for (auto z : h) {
    lo = std::min(lo, z.imag());
    hi = std::max(hi, z.imag());
  }
  if (!h.empty() && hi - lo > tol) {
    std::ostringstream os;
    os << "imaginary part of V is not Hamiltonian (oscillation of Im h = " << hi - lo << ")";
    throw ObstructionError(os.str(), hi - lo);
  }
  std::vector<double> out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) out[k] = h[k].real();
  return out;
}

}  // namespace

std::vector<double> hamiltonian(const TorusTranslation& v, const Torus& x, const std::vector<double>& g,
                                double tol) {
  const auto e = exactness_check(v, x, g, tol);
  if (!e.exact) {
    std::ostringstream os;
    os << "V -| omega is not dbar-exact (obstruction " << e.obstruction << ")";
    throw ObstructionError(os.str(), e.obstruction);
  }
  return real_hamiltonian(e.h, tol);
}

std::vector<double> hamiltonian(const Cp1Dilation& v, const Cp1& x, const Cp1Density& omega, double tol) {
  return real_hamiltonian(exactness_check(v, x, omega, tol).h, tol);
}

std::array<std::vector<double>, 2> hamiltonian(const ProductDilation& v, const Cp1Product& x, double tol) {
  const auto h1 = hamiltonian(Cp1Dilation{v.a1}, x.first(), reference(x.first()), tol);
  const auto h2 = hamiltonian(Cp1Dilation{v.a2}, x.second(), reference(x.second()), tol);
  const std::vector<double> zero(x.side(), 0.0);
  return {product::split_sum(x, h1, zero), product::split_sum(x, zero, h2)};
}

}  // namespace flows
}  // namespace kahler
