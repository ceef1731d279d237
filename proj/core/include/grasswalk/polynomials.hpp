#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "grasswalk/params.hpp"
#include "grasswalk/quadrature.hpp"
#include "grasswalk/weights.hpp"

namespace grasswalk {

struct OrbitTerm {
  Weight mu;
  double c = 0.0;
};

/// R_lambda = sum_mu c_{lambda mu} M_mu over mu <= lambda (BasisOrder).
struct JacobiExpansion {
  Weight lambda;
  ModelParams params;
  std::vector<OrbitTerm> coeffs;
  int grid_nodes = 0;
  double tolerance = 0.0;

  double coefficient(const Weight& mu) const;
  double coefficient_sum() const;
  double min_coefficient() const;
};

/// All Jacobi polynomials R_mu with mu_1 <= degree_cap for one parameter set,
/// obtained by orthogonalizing the orbit sums (in BasisOrder) against the
/// weighted inner product of the chamber rule.
///
/// The orthogonalization is a blocked Householder QR of the weighted
/// node-value matrix; column j of R^{-1} holds the orbit-sum coefficients of
/// the j-th orthogonal polynomial, which is then scaled to value 1 at x = 0.
/// Orbit coefficients outside the dominance down-set are numerically zero and
/// are dropped; the largest dropped magnitude is kept as a diagnostic.
class JacobiBasis {
 public:
  JacobiBasis(const ModelParams& params, int degree_cap, const QuadratureGrid& grid);

  /// Process-wide cache keyed by (d, p, q, degree_cap, nodes_per_axis).
  /// Concurrent readers, serialized insertion.
  static std::shared_ptr<const JacobiBasis> shared(const ModelParams& params, int degree_cap,
                                                   int nodes_per_axis);

  const ModelParams& params() const noexcept { return params_; }
  int degree_cap() const noexcept { return degree_cap_; }
  int nodes_per_axis() const noexcept { return nodes_per_axis_; }
  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<Weight>& weights() const noexcept { return weights_; }
  std::optional<std::size_t> index_of(const Weight& w) const;

  /// Column j: orbit coefficients of R_{weights[j]} (upper triangular).
  const Eigen::MatrixXd& coefficients() const noexcept { return coeffs_; }
  double norm2(std::size_t j) const { return norm2_[j]; }
  double unit_norm2() const noexcept { return unit_norm2_; }
  double moment(std::size_t j) const { return moments_[j]; }
  double triangularity_residual() const noexcept { return triangularity_residual_; }
  double tolerance() const noexcept { return 1e-8; }

  JacobiExpansion expansion(std::size_t j) const;
  double evaluate(std::size_t j, std::span<const double> x) const;

  /// Chamber-rule data used by linearization: weights w_i = omega_i delta(x_i)
  /// and the values R_j(x_i) as an (nodes x size) matrix.
  const Eigen::VectorXd& node_weights() const noexcept { return node_weights_; }
  const Eigen::MatrixXd& node_values() const noexcept { return node_values_; }

 private:
  ModelParams params_;
  int degree_cap_;
  int nodes_per_axis_;
  std::vector<Weight> weights_;
  std::unordered_map<std::string, std::size_t> index_;
  Eigen::MatrixXd coeffs_;
  std::vector<double> norm2_;
  std::vector<double> moments_;
  double unit_norm2_ = 0.0;
  double triangularity_residual_ = 0.0;
  Eigen::VectorXd node_weights_;
  Eigen::MatrixXd node_values_;
};

/// Throws GridUnderResolved when validate_grid at degree lambda_1 fails,
/// NumericBreakdown when the orthogonalization loses rank, RankMismatch when
/// the grid, weight and params disagree on q.
JacobiExpansion jacobi_expand(const Weight& lambda, const ModelParams& params,
                              const QuadratureGrid& grid);

double jacobi_eval(const JacobiExpansion& expansion, std::span<const double> x);
inline double jacobi_eval(const JacobiExpansion& expansion, const ChamberPoint& x) {
  return jacobi_eval(expansion, std::span<const double>(x.coords));
}

/// Normalized classical Jacobi polynomial R_{lambda/2}^{(alpha,beta)}(cos 2x)
/// by three-term recurrence. Throws RankNotOne.
double jacobi_eval_rank_one(const Weight& lambda, const ModelParams& params, double x);

/// m(lambda) = -d^2/dx_1^2 R_lambda at 0 = sum_mu c_{lambda mu} |mu|^2 / q.
double moment_m(const JacobiExpansion& expansion);
/// lambda(lambda + dp + d - 2)/(dp). Throws RankNotOne.
double moment_m_rank_one(const Weight& lambda, const ModelParams& params);

/// {lambda, params{d,p,q}, coeffs: [{mu, c}], grid_nodes, tolerance}
std::string to_json(const JacobiExpansion& expansion);
JacobiExpansion expansion_from_json(std::string_view text);

}  // namespace grasswalk
