#include "kahler/manifold.hpp"

#include "kahler/conventions.hpp"

namespace kahler {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::size_t node_count(const Manifold& x) {
  return std::visit([](const auto& m) { return m.nodes(); }, x);
}

double volume(const Manifold& x) {
  return std::visit([](const auto& m) { return m.volume(); }, x);
}

int dimension(const Manifold& x) { return std::holds_alternative<Cp1Product>(x) ? 2 : 1; }

double spacing(const Manifold& x) {
  return std::visit(overloaded{
                        [](const Torus& t) { return t.spacing(); },
                        [](const Cp1& c) { return c.spacing(); },
                        [](const Cp1Product& p) { return p.first().spacing(); },
                    },
                    x);
}

std::vector<double> node_weights(const Manifold& x) {
  return std::visit(overloaded{
                        [](const Torus& t) {
                          std::vector<double> q(t.density());
                          for (auto& v : q) v *= t.cell_form_area();
                          return q;
                        },
                        [](const Cp1& c) {
                          std::vector<double> q(c.weights());
                          for (auto& v : q) v *= two_pi;
                          return q;
                        },
                        [](const Cp1Product& p) {
                          const std::size_t n = p.side();
                          std::vector<double> q(p.nodes());
                          for (std::size_t j = 0; j < n; ++j)
                            for (std::size_t i = 0; i < n; ++i)
                              q[i + n * j] = two_pi * two_pi * p.first().weights()[i] * p.second().weights()[j];
                          return q;
                        },
                    },
                    x);
}

double integrate_omega(const Manifold& x, const std::vector<double>& f) {
  return std::visit(overloaded{
                        [&](const Torus& t) {
                          std::vector<double> r(f);
                          for (std::size_t k = 0; k < r.size(); ++k) r[k] *= t.density()[k];
                          return torus::integrate(t, r);
                        },
                        [&](const Cp1& c) { return cp1::integrate(c, f); },
                        [&](const Cp1Product& p) { return product::integrate(p, f); },
                    },
                    x);
}

double mean_omega(const Manifold& x, const std::vector<double>& f) { return integrate_omega(x, f) / volume(x); }

std::vector<double> volume_ratio(const Manifold& x, const std::vector<double>& u, double s) {
  return std::visit(overloaded{
                        [&](const Torus& t) {
                          auto r = torus::ddbar(t, u);
                          for (std::size_t k = 0; k < r.size(); ++k) r[k] = 1.0 + s * r[k] / t.density()[k];
                          return r;
                        },
                        [&](const Cp1& c) {
                          auto r = cp1::ddbar(c, u);
                          for (auto& v : r) v = 1.0 + s * v;
                          return r;
                        },
                        [&](const Cp1Product& p) { return product::monge_ampere_ratio(p, product::hessian(p, u), s); },
                    },
                    x);
}

bool is_positive(const Manifold& x, const std::vector<double>& u) {
  const auto r = volume_ratio(x, u);
  for (double v : r)
    if (!(v > 0.0)) return false;
  if (const auto* p = std::get_if<Cp1Product>(&x)) {
    const auto h = product::hessian(*p, u);
    for (double v : h.a1)
      if (!(1.0 + v > 0.0)) return false;
  }
  return true;
}

std::vector<double> dbar_inner(const Manifold& x, const std::vector<double>& f, const std::vector<double>& g,
                               const std::vector<double>& u) {
  return std::visit(overloaded{
                        [&](const Torus& t) {
                          const auto bf = torus::dbar(t, f);
                          const auto bg = torus::dbar(t, g);
                          const auto a = torus::ddbar(t, u);
                          std::vector<double> out(f.size());
                          for (std::size_t k = 0; k < out.size(); ++k)
                            out[k] = (bf[k] * std::conj(bg[k])).real() / (t.density()[k] + a[k]);
                          return out;
                        },
                        [&](const Cp1& c) { return cp1::dbar_inner(c, f, g, cp1::metric_of(c, u).ratio); },
                        [&](const Cp1Product& p) { return product::dbar_inner(p, f, g, u); },
                    },
                    x);
}

std::array<double, 2> node_coord(const Manifold& x, std::size_t k) {
  return std::visit(overloaded{
                        [&](const Torus& t) {
                          const int n = t.size();
                          return std::array<double, 2>{t.coord(static_cast<int>(k) % n), t.coord(static_cast<int>(k) / n)};
                        },
                        [&](const Cp1& c) { return std::array<double, 2>{c.coord(k), 0.0}; },
                        [&](const Cp1Product& p) {
                          const std::size_t n = p.side();
                          return std::array<double, 2>{p.first().coord(k % n), p.second().coord(k / n)};
                        },
                    },
                    x);
}

}  // namespace kahler
