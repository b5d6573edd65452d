#include "kahler/torus.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "kahler/conventions.hpp"
#include "kahler/error.hpp"

namespace kahler {

namespace {

// FFTW plans cached per size.  Planning is not thread-safe, so it runs under a
// lock; fftw_execute_dft on fresh arrays is.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

PlanPair plans_for(int n) {
  static std::mutex mu;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  PlanPair p{fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE),
             fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE)};
  fftw_free(buf);
  cache.emplace(n, p);
  return p;
}

// Row-major in FFTW's sense: the last dimension (i, along x1) is contiguous.
std::vector<cplx> fft(int n, std::vector<cplx> a, bool forward) {
  const auto p = plans_for(n);
  auto* data = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(forward ? p.forward : p.backward, data, data);
  if (!forward) {
    const double s = 1.0 / (static_cast<double>(n) * n);
    for (auto& v : a) v *= s;
  }
  return a;
}

std::vector<cplx> to_complex(const std::vector<double>& u) { return {u.begin(), u.end()}; }

double wavenumber(int k, int n) {
  const int kk = k <= n / 2 ? k : k - n;
  // Nyquist mode: odd derivatives of a real band-limited field drop it.
  return 2.0 * pi * kk;
}

bool is_nyquist(int k, int n) { return k == n / 2; }

void check_shape(const Torus& x, std::size_t size) {
  if (size != x.nodes()) throw PreconditionError("torus field does not match the grid");
}

// Multiply the spectrum by sigma(k1, k2).
template <class Symbol>
std::vector<cplx> apply_symbol(const Torus& x, std::vector<cplx> f, Symbol sigma) {
  const int n = x.size();
  auto hat = fft(n, std::move(f), true);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) hat[i + static_cast<std::size_t>(n) * j] *= sigma(i, j);
  return fft(n, std::move(hat), false);
}

// First-derivative symbol of (d_x1 + s i d_x2)/2, s = +1 for dbar, -1 for d.
cplx half_cr_symbol(int i, int j, int n, double s) {
  const double k1 = is_nyquist(i, n) ? 0.0 : wavenumber(i, n);
  const double k2 = is_nyquist(j, n) ? 0.0 : wavenumber(j, n);
  // d/dx -> i k
  return 0.5 * (cplx(0.0, k1) + s * cplx(0.0, 1.0) * cplx(0.0, k2));
}

}  // namespace

Torus Torus::make(int n, DensityProfile xi) {
  if (n < 16 || (n & (n - 1)) != 0)
    throw PreconditionError("torus resolution must be a power of two >= 16");
  Torus t;
  t.n_ = n;
  t.xi_ = std::move(xi);
  t.density_.resize(t.nodes());
  const double h = 1.0 / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v = t.xi_(i * h, j * h);
      if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << "torus density not positive at node (" << i * h << ", " << j * h << "): " << v;
        throw PositivityError(os.str(), static_cast<double>(i + n * j));
      }
      t.density_[i + static_cast<std::size_t>(n) * j] = v;
      sum += v;
    }
  t.idz_cell_ = idzdzbar_area * h * h;
  t.volume_ = sum * t.idz_cell_;
  return t;
}

namespace torus {

std::vector<cplx> dbar_complex(const Torus& x, const std::vector<cplx>& f) {
  check_shape(x, f.size());
  const int n = x.size();
  return apply_symbol(x, f, [n](int i, int j) { return half_cr_symbol(i, j, n, 1.0); });
}

std::vector<cplx> dbar(const Torus& x, const std::vector<double>& u) {
  return dbar_complex(x, to_complex(u));
}

std::vector<cplx> del(const Torus& x, const std::vector<double>& u) {
  check_shape(x, u.size());
  const int n = x.size();
  return apply_symbol(x, to_complex(u), [n](int i, int j) { return half_cr_symbol(i, j, n, -1.0); });
}

std::vector<double> ddbar(const Torus& x, const std::vector<double>& u) {
  check_shape(x, u.size());
  const int n = x.size();
  auto r = apply_symbol(x, to_complex(u), [n](int i, int j) {
    const double k1 = wavenumber(i, n), k2 = wavenumber(j, n);
    return cplx(-0.25 * (k1 * k1 + k2 * k2), 0.0);
  });
  std::vector<double> out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = r[k].real();
  return out;
}

double integrate(const Torus& x, const std::vector<double>& rho) {
  check_shape(x, rho.size());
  double s = 0.0;
  for (double v : rho) s += v;
  return s * x.cell_form_area();
}

cplx integrate(const Torus& x, const std::vector<cplx>& rho) {
  check_shape(x, rho.size());
  cplx s = 0.0;
  for (auto v : rho) s += v;
  return s * x.cell_form_area();
}

double omega_mean(const Torus& x, const std::vector<double>& f) {
  check_shape(x, f.size());
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * x.density()[k];
  return s * x.cell_form_area() / x.volume();
}

std::vector<double> poisson_solve(const Torus& x, const std::vector<double>& rho, double tol) {
  check_shape(x, rho.size());
  const double total = integrate(x, rho);
  if (std::abs(total) > tol * x.volume()) {
    std::ostringstream os;
    os << "poisson_solve: right-hand side integrates to " << total;
    throw CompatibilityError(os.str(), total);
  }
  const int n = x.size();
  auto r = apply_symbol(x, to_complex(rho), [n](int i, int j) {
    if (i == 0 && j == 0) return cplx(0.0, 0.0);  // mean-zero gauge
    const double k1 = wavenumber(i, n), k2 = wavenumber(j, n);
    return cplx(-4.0 / (k1 * k1 + k2 * k2), 0.0);
  });
  std::vector<double> u(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) u[k] = r[k].real();
  // Mean zero against omega rather than dx dy.
  const double m = omega_mean(x, u);
  for (auto& v : u) v -= m;
  return u;
}

std::vector<cplx> dbar_solve(const Torus& x, const std::vector<cplx>& b) {
  check_shape(x, b.size());
  const int n = x.size();
  auto h = apply_symbol(x, b, [n](int i, int j) {
    const cplx s = half_cr_symbol(i, j, n, 1.0);
    if (std::abs(s) == 0.0) return cplx(0.0, 0.0);
    return 1.0 / s;
  });
  cplx mean = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) mean += h[k] * x.density()[k];
  mean *= x.cell_form_area() / x.volume();
  for (auto& v : h) v -= mean;
  return h;
}

cplx harmonic_part(const Torus& x, const std::vector<cplx>& b) {
  check_shape(x, b.size());
  cplx s = 0.0;
  for (auto v : b) s += v;
  return s / static_cast<double>(b.size());
}

}  // namespace torus
}  // namespace kahler
