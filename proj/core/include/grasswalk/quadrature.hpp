#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace grasswalk {

/// BC multiplicities (k1, k2, k3) attached to the roots 2e_i, 4e_i, 2(e_i +- e_j).
struct MultiplicityTriple {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;

  bool operator==(const MultiplicityTriple&) const = default;
};

/// k(p) = (d(p - q)/2, (d - 1)/2, d/2).
MultiplicityTriple multiplicities(int d, double p, int q);

/// Gauss-Legendre rule on [0, pi/2], one axis of a rank-q tensor grid.
/// A graded grid maps the Gauss-Legendre nodes through x = (pi/2) u^2, which
/// turns a fractional power x^b at the origin into u^(2b+1) and restores fast
/// convergence. Immutable after construction.
class QuadratureGrid {
 public:
  int rank() const noexcept { return rank_; }
  bool graded() const noexcept { return graded_; }
  int nodes_per_axis() const noexcept { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> axis_weights() const noexcept { return weights_; }

 private:
  friend QuadratureGrid make_grid(int q, int nodes_per_axis, bool graded);
  int rank_ = 0;
  bool graded_ = false;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Throws InvalidNodeCount for nodes_per_axis < 2, InvalidArgument for q < 1.
QuadratureGrid make_grid(int q, int nodes_per_axis, bool graded = false);
/// Graded exactly when the density has a fractional power at the origin.
QuadratureGrid make_grid(int q, int nodes_per_axis, const MultiplicityTriple& k);

/// Gauss-Legendre nodes/weights on [-1, 1], ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Flattened tensor rule: point i occupies coords[i*q .. i*q+q).
struct TensorRule {
  int rank = 0;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> point(std::size_t i) const noexcept {
    return {coords.data() + i * static_cast<std::size_t>(rank), static_cast<std::size_t>(rank)};
  }
};

/// Plain tensor product over the cube [0, pi/2]^q.
TensorRule cube_rule(const QuadratureGrid& grid);

/// Collapsed (Duffy-type) tensor rule over the alcove pi/2 >= x1 >= ... >= xq >= 0,
/// scaled by q! so that for permutation-invariant integrands it reproduces the
/// cube integral. The odd-d density factor |sin(x_i - x_j)| has a kink on the
/// cube diagonal; here the kink lies on the boundary of the integration cell.
TensorRule chamber_rule(const QuadratureGrid& grid);

/// delta_k(x) = prod_i |2 sin x_i|^{2k1} |2 sin 2x_i|^{2k2}
///              prod_{i<j} |2 sin(x_i - x_j)|^{2k3} |2 sin(x_i + x_j)|^{2k3}.
double bc_weight_density(std::span<const double> x, const MultiplicityTriple& k);

using CubeFunction = std::function<double(std::span<const double>)>;

/// <f, g> over the cube tensor grid with weight delta_k.
double inner_product(const CubeFunction& f, const CubeFunction& g, const QuadratureGrid& grid,
                     const MultiplicityTriple& k);

/// <f, g> for permutation-invariant f, g using the chamber rule. Agrees with
/// inner_product up to quadrature error, converges spectrally for odd d.
double invariant_inner_product(const CubeFunction& f, const CubeFunction& g,
                               const QuadratureGrid& grid, const MultiplicityTriple& k);

struct GridDiagnostics {
  int nodes_per_axis = 0;
  int refined_nodes_per_axis = 0;
  int degree = 0;
  double constant_change = 0.0;  // relative change of <1,1>
  double orbit_change = 0.0;     // relative change of <M_top, M_top>
  double tolerance = 0.0;
  bool resolved = false;
};

/// Compares <1,1> and <M_lambda, M_lambda> (lambda = (degree, ..., degree))
/// at the grid's resolution and at twice as many nodes per axis (same grading).
GridDiagnostics validate_grid(const QuadratureGrid& grid, const MultiplicityTriple& k, int degree,
                              double tolerance = 1e-10);

/// True when every density exponent 2k is an integer (no endpoint singularity).
bool integer_exponents(const MultiplicityTriple& k) noexcept;

/// max(64, 2*degree + 32); grids for fractional exponents are graded and get
/// max(128, 4*degree + 64) because grading stretches frequencies near pi/2.

int default_nodes_per_axis(const MultiplicityTriple& k, int degree);

}  // namespace grasswalk
