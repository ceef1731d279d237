#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "grasswalk/integral_rep.hpp"
#include "grasswalk/params.hpp"
#include "grasswalk/rng.hpp"
#include "grasswalk/weights.hpp"

namespace grasswalk {

/// Pre-drawn (w, u) pairs for the Bessel integral, stored as the q x q real
/// kernels K_ab = Re(w_ab u_ba), so that Re tr(w x u lambda) = sum lambda_a x_b K_ab.
/// Evaluations at different (lambda, x) on one pool use common random numbers.
class BesselPool {
 public:
  BesselPool(const ModelParams& params, std::size_t n_samples, Rng& rng);

  std::size_t size() const noexcept { return n_; }
  bool correlated() const noexcept { return correlated_; }

  /// Returns 1 with zero error when lambda = 0 or x = 0.
  McEstimate evaluate(std::span<const double> lambda, std::span<const double> x) const;
  /// Plain sample mean of cos(...), no error bookkeeping.
  double mean(std::span<const double> lambda, std::span<const double> x) const;

 private:
  int q_;
  std::size_t n_;
  bool correlated_;
  std::vector<double> kernels_;
};

/// MC estimate of the flat-limit Bessel function at spectral value lambda and
/// point x. Throws UnsupportedAlgebra for d = 4.
McEstimate bessel_eval_mc(std::span<const double> lambda, const ChamberPoint& x,
                          const ModelParams& params, std::size_t n_samples, Rng& rng);

/// j_alpha(lambda x) with alpha = dp/2 - 1: power series for |z| <= 12, the
/// cylinder Bessel function beyond. Throws RankNotOne, SeriesRange for |z| > 50.
double bessel_eval_rank_one(double lambda, double x, const ModelParams& params);

/// Singular-value law on the chamber with density proportional to
/// prod_j x_j^{d(p-q+1)-1} prod_{i<j} (x_i^2 - x_j^2)^d exp(-|x|^2/2).
/// The normalization and the CDF of x_1 are computed on first use and shared
/// between copies; concurrent first use is safe.
class LaguerreEnsemble {
 public:
  explicit LaguerreEnsemble(const ModelParams& params);

  const ModelParams& params() const noexcept { return params_; }
  double unnormalized(std::span<const double> x) const;
  double normalization() const;
  /// Truncation radius for the quadrature: max(8, sqrt(total degree) + 8).
  double radius() const noexcept;
  /// P(x_1 <= t), interpolated from a precomputed table.
  double first_marginal_cdf(double t) const;
  /// E[x_i] and E[x_i^2] per coordinate by quadrature.
  std::vector<double> coordinate_means() const;
  std::vector<double> coordinate_second_moments() const;

  struct Cache;

 private:
  ModelParams params_;
  std::shared_ptr<Cache> cache_;
};

/// Normalized density; throws NotInChamber.
double laguerre_density(const ChamberPoint& x, const LaguerreEnsemble& ens);

/// Decreasing singular values of a standard Gaussian p x q matrix over R, C or
/// H (H through its complex 2p x 2q form, one value per pair). Each real
/// component is N(0, 1). Throws NonIntegerP.
ChamberPoint laguerre_sample(const LaguerreEnsemble& ens, Rng& rng);

struct GaussianTransformReport {
  std::vector<double> lambda;
  double target = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double residual = 0.0;
  std::size_t n_samples = 0;  // ensemble draws
  std::size_t n_inner = 0;    // Bessel samples per pool
  std::size_t batches = 0;
  std::uint64_t seed = 0;
};

/// |E phi(lambda, X) - exp(-|lambda|^2/2)| with X ~ Laguerre ensemble. The
/// ensemble draws are split into batches; every batch gets its own Bessel
/// pool of n_inner samples, and the error is the spread of batch means, which
/// carries both the outer and the inner MC error.
GaussianTransformReport gaussian_transform_residual(std::span<const double> lambda,
                                                    const ModelParams& params,
                                                    std::size_t n_samples, std::size_t n_inner,
                                                    std::uint64_t seed, int threads = 1,
                                                    std::size_t batches = 50);

}  // namespace grasswalk
