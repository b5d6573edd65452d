#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace kahler {

using cplx = std::complex<double>;

/// Density profile xi(x1, x2) of omega = xi i dz^dz-bar, periodic on [0,1)^2.
using DensityProfile = std::function<double(double, double)>;

/// Flat torus C/Z^2 on an N x N periodic grid, nodes x = (i/N, j/N).
/// Fields are stored row-major with index i + N j (i along x1).
class Torus {
 public:
  /// Rejects N < 16, N not a power of two, and xi <= 0 at any node.
  static Torus make(int n, DensityProfile xi);

  int size() const noexcept { return n_; }
  std::size_t nodes() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  double coord(int i) const noexcept { return static_cast<double>(i) / n_; }

  const DensityProfile& profile() const noexcept { return xi_; }
  /// xi sampled at the nodes.
  const std::vector<double>& density() const noexcept { return density_; }
  /// int_X omega = int 2 xi dx dy.
  double volume() const noexcept { return volume_; }
  /// Area of one cell against i dz^dz-bar, i.e. 2 h^2.
  double cell_form_area() const noexcept { return idz_cell_; }

 private:
  int n_ = 0;
  DensityProfile xi_;
  std::vector<double> density_;
  double volume_ = 0.0;
  double idz_cell_ = 0.0;
};

namespace torus {

/// Coefficient b of dbar u = b dz-bar, i.e. u_{zbar}; exact for band-limited u.
std::vector<cplx> dbar(const Torus& x, const std::vector<double>& u);
/// Coefficient of du = u_z dz.
std::vector<cplx> del(const Torus& x, const std::vector<double>& u);
/// Coefficient of i ddbar u against i dz^dz-bar, i.e. Laplacian(u)/4.
std::vector<double> ddbar(const Torus& x, const std::vector<double>& u);
/// dbar of a complex function.
std::vector<cplx> dbar_complex(const Torus& x, const std::vector<cplx>& f);

/// int_X rho i dz^dz-bar for a coefficient rho (exact for band-limited rho).
double integrate(const Torus& x, const std::vector<double>& rho);
cplx integrate(const Torus& x, const std::vector<cplx>& rho);
/// Mean of f against omega^n/n!.
double omega_mean(const Torus& x, const std::vector<double>& f);

/// Mean-zero u with Laplacian(u)/4 = rho.  Throws CompatibilityError when
/// |int rho i dz^dz-bar| > tol * V(X).
std::vector<double> poisson_solve(const Torus& x, const std::vector<double>& rho,
                                  double tol = 1e-8);
/// Complex variant: mean-zero h with h_{zbar} = b after removing the harmonic part.
std::vector<cplx> dbar_solve(const Torus& x, const std::vector<cplx>& b);

/// Harmonic (zero-frequency) part of a (0,1)-form b dz-bar: the mean of b.
/// b dz-bar is dbar-exact iff this vanishes.
cplx harmonic_part(const Torus& x, const std::vector<cplx>& b);

}  // namespace torus
}  // namespace kahler
