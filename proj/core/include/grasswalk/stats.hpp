#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace grasswalk {

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;  // unbiased sample variance
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> values);

/// Mean of `values` with the standard error taken from `batches` contiguous
/// batch means (for correlated sequences).
MeanSe batch_means(std::span<const double> values, std::size_t batches);

/// sup_t |F_n(t) - cdf(t)| for a sorted sample.
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// KS distance with a continuity correction for data on a lattice of the
/// given spacing: the empirical CDF at each atom a is compared with
/// cdf(a + spacing/2).
double ks_distance_lattice(std::span<const double> sorted,
                           const std::function<double(double)>& cdf, double spacing);

/// Smallest positive gap between distinct sorted values (0 if none).
double lattice_spacing(std::span<const double> sorted);

/// Linear interpolation of order statistics, p in [0, 1].
double quantile(std::span<const double> sorted, double p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace grasswalk
