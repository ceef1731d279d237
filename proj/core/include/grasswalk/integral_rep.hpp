#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>

#include "grasswalk/params.hpp"
#include "grasswalk/rng.hpp"
#include "grasswalk/weights.hpp"

namespace grasswalk {

/// Real matrices (d = 1) are stored with zero imaginary part.
using CMatrix = Eigen::MatrixXcd;

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double imag_mean = 0.0;  // should vanish within MC error
  std::size_t n = 0;
};

/// Haar-distributed element of O(q) (d = 1) or U(q) (d = 2): QR of a Gaussian
/// matrix with the phases of R's diagonal moved into Q. Throws UnsupportedAlgebra
/// for d = 4.
CMatrix sample_haar_unitary(int q, int d, Rng& rng);

/// Draws from the matrix-ball law m_p. Integer p uses the top q x q block of
/// the first q columns of a Haar unitary of size p; other p > 2q-1 run a
/// random-walk Metropolis chain on det(I - w*w)^{pd/2 - gamma}, keeping its
/// state between draws (burn-in 1000, thinning 10, step tuned to an
/// acceptance rate in [0.2, 0.5]).
class MatrixBallSampler {
 public:
  /// Throws UnsupportedAlgebra (d = 4) or InvalidArgument (non-integer p <= 2q - 1).
  explicit MatrixBallSampler(const ModelParams& params);

  /// Throws NotConverged if the step size cannot be tuned.
  CMatrix draw(Rng& rng);

  bool uses_metropolis() const noexcept { return metropolis_; }
  double step_size() const noexcept { return step_; }
  double acceptance_rate() const noexcept;

 private:
  bool propose(Rng& rng);
  double log_target(const CMatrix& w) const;
  void burn_in(Rng& rng);

  ModelParams params_;
  bool metropolis_ = false;
  bool warmed_ = false;
  double exponent_ = 0.0;
  double step_ = 0.3;
  CMatrix state_;
  double state_log_ = 0.0;
  std::size_t proposed_ = 0;
  std::size_t accepted_ = 0;
};

/// Single draw; for many draws keep a MatrixBallSampler instead (the
/// Metropolis path would otherwise burn in on every call).
CMatrix sample_mp(const ModelParams& params, Rng& rng);

/// prod_r Delta_r(a)^{e_r - e_{r+1}} with e_{q+1} = 0 and Delta_r the leading
/// principal minors. Throws SingularMinor for a zero minor with a negative
/// power, InvalidArgument on size mismatch.
std::complex<double> power_function(const CMatrix& a, std::span<const int> exponents);

/// MC estimate of R_lambda(x) from the matrix-ball integral representation.
/// x = 0 or lambda = 0 return 1 exactly with zero error.
McEstimate jacobi_eval_mc(const Weight& lambda, const ModelParams& params, const ChamberPoint& x,
                          std::size_t n_samples, Rng& rng);

}  // namespace grasswalk
