#pragma once

#include <string>
#include <vector>

#include "grasswalk/quadrature.hpp"

namespace grasswalk {

/// Model parameters (d, p, q) of the compact Grassmannian family and the
/// quantities derived from them.
class ModelParams {
 public:
  /// Requires d in {1,2,4}, q >= 1 and p >= q. Throws InvalidArgument.
  static ModelParams make(int d, double p, int q);

  int d() const noexcept { return d_; }
  double p() const noexcept { return p_; }
  int q() const noexcept { return q_; }

  MultiplicityTriple k() const noexcept { return multiplicities(d_, p_, q_); }
  /// rho_i = (d/2)(p + q + 2 - 2i) - 1, i = 1..q.
  std::vector<double> rho() const;
  /// d(q - 1/2) + 1
  double gamma() const noexcept { return d_ * (q_ - 0.5) + 1.0; }
  /// Rank-one Jacobi indices alpha = (dp - 2)/2, beta = (d - 2)/2.
  double alpha() const noexcept { return (d_ * p_ - 2.0) / 2.0; }
  double beta() const noexcept { return (d_ - 2.0) / 2.0; }

  bool integer_p() const noexcept;
  /// p in {q, ..., 2q-1} or p > 2q-1: the range covered by the integral
  /// representations and the Mehler-Heine bound.
  bool in_representation_range() const noexcept;

  /// "d=1,p=3,q=2"
  std::string describe() const;

  bool operator==(const ModelParams&) const = default;

 private:
  ModelParams(int d, double p, int q) : d_(d), p_(p), q_(q) {}
  int d_ = 1;
  double p_ = 1.0;
  int q_ = 1;
};

}  // namespace grasswalk
