#pragma once

#include <variant>
#include <vector>

#include "kahler/cp1.hpp"
#include "kahler/torus.hpp"

namespace kahler {

/// Any supported backend.  Scalar fields are plain node vectors in the
/// backend's ordering.
using Manifold = std::variant<Torus, Cp1, Cp1Product>;

std::size_t node_count(const Manifold& x);
double volume(const Manifold& x);
/// Complex dimension n.
int dimension(const Manifold& x);

/// Node weights q_k with sum q_k f_k = int f omega^n/n!.
std::vector<double> node_weights(const Manifold& x);
/// int f omega^n/n!.
double integrate_omega(const Manifold& x, const std::vector<double>& f);
double mean_omega(const Manifold& x, const std::vector<double>& f);

/// (omega + s i ddbar u)^n / omega^n at every node.
std::vector<double> volume_ratio(const Manifold& x, const std::vector<double>& u, double s = 1.0);
/// True when omega + i ddbar u is a positive form at every node (not only its
/// top power).
bool is_positive(const Manifold& x, const std::vector<double>& u);
/// <dbar f, dbar g> measured by omega + i ddbar u.
std::vector<double> dbar_inner(const Manifold& x, const std::vector<double>& f,
                               const std::vector<double>& g, const std::vector<double>& u);

/// Node coordinates: (x1, x2) on the torus, (m, 0) on cp1, (m1, m2) on the product.
std::array<double, 2> node_coord(const Manifold& x, std::size_t k);
/// Grid spacing of the backend (cells per unit length inverted).
double spacing(const Manifold& x);

}  // namespace kahler
