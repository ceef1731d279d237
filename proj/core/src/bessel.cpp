#include "grasswalk/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "grasswalk/error.hpp"
#include "grasswalk/parallel.hpp"
#include "grasswalk/quadrature.hpp"
#include "grasswalk/stats.hpp"

namespace grasswalk {

BesselPool::BesselPool(const ModelParams& params, std::size_t n_samples, Rng& rng)
    : q_(params.q()), n_(n_samples), correlated_(false) {
  MatrixBallSampler ball(params);
  correlated_ = ball.uses_metropolis();
  const auto q = static_cast<std::size_t>(q_);
  kernels_.resize(n_ * q * q);
  for (std::size_t s = 0; s < n_; ++s) {
    const CMatrix w = ball.draw(rng);
    const CMatrix u = sample_haar_unitary(q_, params.d(), rng);
    double* k = &kernels_[s * q * q];
    for (int a = 0; a < q_; ++a) {
      for (int b = 0; b < q_; ++b) {
        k[static_cast<std::size_t>(a) * q + static_cast<std::size_t>(b)] = (w(a, b) * u(b, a)).real();
      }
    }
  }
}

namespace {

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double t) { return t == 0.0; });
}

}  // namespace

double BesselPool::mean(std::span<const double> lambda, std::span<const double> x) const {
  const auto q = static_cast<std::size_t>(q_);
  if (lambda.size() != q || x.size() != q) {
    throw Error(ErrorCode::RankMismatch, "lambda and x must have q entries");
  }
  if (all_zero(lambda) || all_zero(x)) return 1.0;
  std::vector<double> lx(q * q);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) lx[a * q + b] = lambda[a] * x[b];
  }
  double total = 0.0;
  for (std::size_t s = 0; s < n_; ++s) {
    const double* k = &kernels_[s * q * q];
    double phase = 0.0;
    for (std::size_t i = 0; i < q * q; ++i) phase += lx[i] * k[i];
    total += std::cos(phase);
  }
  return total / static_cast<double>(n_);
}

McEstimate BesselPool::evaluate(std::span<const double> lambda, std::span<const double> x) const {
  const auto q = static_cast<std::size_t>(q_);
  if (lambda.size() != q || x.size() != q) {
    throw Error(ErrorCode::RankMismatch, "lambda and x must have q entries");
  }
  if (all_zero(lambda) || all_zero(x)) return {1.0, 0.0, 0.0, n_};
  std::vector<double> lx(q * q);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) lx[a * q + b] = lambda[a] * x[b];
  }
  std::vector<double> values(n_);
  double imag = 0.0;
  for (std::size_t s = 0; s < n_; ++s) {
    const double* k = &kernels_[s * q * q];
    double phase = 0.0;
    for (std::size_t i = 0; i < q * q; ++i) phase += lx[i] * k[i];
    values[s] = std::cos(phase);
    imag += std::sin(phase);
  }
  const MeanSe stats = correlated_ ? batch_means(values, 20) : mean_se(values);
  return {stats.mean, stats.std_error, imag / static_cast<double>(n_), n_};
}

McEstimate bessel_eval_mc(std::span<const double> lambda, const ChamberPoint& x,
                          const ModelParams& params, std::size_t n_samples, Rng& rng) {
  if (params.d() == 4) {
    throw Error(ErrorCode::UnsupportedAlgebra,
                "quaternionic matrices are not supported by the Monte Carlo path");
  }
  if (static_cast<int>(lambda.size()) != params.q() || x.rank() != params.q()) {
    throw Error(ErrorCode::RankMismatch, "lambda and x must have q entries");
  }
  if (!x.in_chamber()) throw Error(ErrorCode::NotInChamber, "x must lie in the chamber");
  if (all_zero(lambda) || all_zero(x.coords)) return {1.0, 0.0, 0.0, n_samples};
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");
  const BesselPool pool(params, n_samples, rng);
  return pool.evaluate(lambda, x.coords);
}

double bessel_eval_rank_one(double lambda, double x, const ModelParams& params) {
  if (params.q() != 1) throw Error(ErrorCode::RankNotOne, "rank-one formula needs q = 1");
  const double z = std::abs(lambda * x);
  if (z == 0.0) return 1.0;
  if (z > 50.0) {
    throw Error(ErrorCode::SeriesRange, "|lambda x| = " + std::to_string(z) + " exceeds 50");
  }
  const double alpha = params.d() * params.p() / 2.0 - 1.0;
  if (z <= 12.0) {
    const double w = -z * z / 4.0;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m <= 80; ++m) {
      term *= w / (m * (alpha + m));
      sum += term;
      if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
    }
    return sum;
  }
  double bessel_j = 0.0;
  if (alpha >= 0.0) {
    bessel_j = std::cyl_bessel_j(alpha, z);
  } else {
    bessel_j = 2.0 * (alpha + 1.0) / z * std::cyl_bessel_j(alpha + 1.0, z) -
               std::cyl_bessel_j(alpha + 2.0, z);
  }
  return std::tgamma(alpha + 1.0) * std::pow(2.0 / z, alpha) * bessel_j;
}

// ---------------------------------------------------------------------------

struct LaguerreEnsemble::Cache {
  std::once_flag once;
  double log_scale = 0.0;  // densities are evaluated as exp(log f - log_scale)
  double normalization = 0.0;
  double radius = 8.0;
  std::vector<double> cdf_t;
  std::vector<double> cdf_f;
  std::vector<double> means;
  std::vector<double> second_moments;
};

namespace {

double coordinate_power(const ModelParams& params) {
  return params.d() * (params.p() - params.q() + 1.0) - 1.0;
}

double log_unnormalized(std::span<const double> x, const ModelParams& params) {
  const double a = coordinate_power(params);
  const int d = params.d();
  double value = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (a != 0.0) {
      if (x[i] <= 0.0) return -INFINITY;
      value += a * std::log(x[i]);
    }
    value -= 0.5 * x[i] * x[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double gap = x[i] * x[i] - x[j] * x[j];
      if (gap <= 0.0) return -INFINITY;
      value += d * std::log(gap);
    }
  }
  return value;
}

int nodes_for_rank(int q) {
  if (q <= 2) return 400;
  if (q == 3) return 100;
  return 40;
}

// Chamber rule for {R >= x_1 >= ... >= x_q >= 0}, weights already divided by q!.
TensorRule scaled_chamber(int q, int nodes, double radius, bool graded) {
  TensorRule rule = chamber_rule(make_grid(q, nodes, graded));
  const double s = radius / (std::numbers::pi / 2.0);
  double factorial = 1.0;
  for (int i = 2; i <= q; ++i) factorial *= i;
  const double wscale = std::pow(s, q) / factorial;
  for (double& c : rule.coords) c *= s;
  for (double& w : rule.weights) w *= wscale;
  return rule;
}

}  // namespace

LaguerreEnsemble::LaguerreEnsemble(const ModelParams& params)
    : params_(params), cache_(std::make_shared<Cache>()) {}

double LaguerreEnsemble::radius() const noexcept {
  const int q = params_.q();
  const double degree = q * coordinate_power(params_) + params_.d() * q * (q - 1) / 2.0;
  return std::max(8.0, std::sqrt(std::max(degree, 0.0)) + 8.0);
}

double LaguerreEnsemble::unnormalized(std::span<const double> x) const {
  return std::exp(log_unnormalized(x, params_));
}

namespace {

void fill_cache(LaguerreEnsemble::Cache& cache, const ModelParams& params, double radius);

}  // namespace

double LaguerreEnsemble::normalization() const {
  std::call_once(cache_->once, [this] { fill_cache(*cache_, params_, radius()); });
  return cache_->normalization;
}

double LaguerreEnsemble::first_marginal_cdf(double t) const {
  normalization();
  const auto& ts = cache_->cdf_t;
  const auto& fs = cache_->cdf_f;
  if (t <= 0.0) return 0.0;
  if (t >= ts.back()) return 1.0;
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const auto hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double frac = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return fs[lo] + frac * (fs[hi] - fs[lo]);
}

std::vector<double> LaguerreEnsemble::coordinate_means() const {
  normalization();
  return cache_->means;
}

std::vector<double> LaguerreEnsemble::coordinate_second_moments() const {
  normalization();
  return cache_->second_moments;
}

namespace {

void fill_cache(LaguerreEnsemble::Cache& cache, const ModelParams& params, double radius) {
  const int q = params.q();
  const auto qs = static_cast<std::size_t>(q);
  cache.radius = radius;

  const double power = coordinate_power(params);
  const bool graded = std::abs(power - std::round(power)) > 1e-12;
  const TensorRule rule = scaled_chamber(q, nodes_for_rank(q), radius, graded);
  std::vector<double> logs(rule.size());
  double log_max = -INFINITY;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    logs[i] = log_unnormalized(rule.point(i), params);
    log_max = std::max(log_max, logs[i]);
  }
  cache.log_scale = log_max;
  double total = 0.0;
  std::vector<double> first(qs, 0.0);
  std::vector<double> second(qs, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double f = rule.weights[i] * std::exp(logs[i] - log_max);
    if (f == 0.0) continue;
    total += f;
    const auto x = rule.point(i);
    for (std::size_t a = 0; a < qs; ++a) {
      first[a] += f * x[a];
      second[a] += f * x[a] * x[a];
    }
  }
  cache.normalization = total * std::exp(log_max);
  cache.means.resize(qs);
  cache.second_moments.resize(qs);
  for (std::size_t a = 0; a < qs; ++a) {
    cache.means[a] = first[a] / total;
    cache.second_moments[a] = second[a] / total;
  }

  // CDF of x_1: the region {x_1 <= t} of the chamber is the chamber cell
  // scaled to t.
  const int points = q == 1 ? 2000 : (q == 2 ? 400 : 200);
  const int nodes = q == 1 ? 96 : (q == 2 ? 120 : 30);
  const TensorRule unit = scaled_chamber(q, nodes, 1.0, graded);
  cache.cdf_t.resize(static_cast<std::size_t>(points) + 1);
  cache.cdf_f.resize(static_cast<std::size_t>(points) + 1);
  std::vector<double> y(qs);
  for (int k = 0; k <= points; ++k) {
    const double t = radius * k / points;
    double mass = 0.0;
    if (k > 0) {
      const double wscale = std::pow(t, q);
      for (std::size_t i = 0; i < unit.size(); ++i) {
        const auto x = unit.point(i);
        for (std::size_t a = 0; a < qs; ++a) y[a] = x[a] * t;
        mass += unit.weights[i] * wscale * std::exp(log_unnormalized(y, params) - log_max);
      }
    }
    cache.cdf_t[static_cast<std::size_t>(k)] = t;
    cache.cdf_f[static_cast<std::size_t>(k)] = std::min(1.0, mass / total);
  }
  // Enforce monotonicity against rounding.
  for (std::size_t k = 1; k < cache.cdf_f.size(); ++k) {
    cache.cdf_f[k] = std::max(cache.cdf_f[k], cache.cdf_f[k - 1]);
  }
}

}  // namespace

double laguerre_density(const ChamberPoint& x, const LaguerreEnsemble& ens) {
  if (!x.in_chamber()) throw Error(ErrorCode::NotInChamber, "x must lie in the chamber");
  if (x.rank() != ens.params().q()) throw Error(ErrorCode::RankMismatch, "point rank differs from q");
  return ens.unnormalized(x.coords) / ens.normalization();
}

ChamberPoint laguerre_sample(const LaguerreEnsemble& ens, Rng& rng) {
  const ModelParams& params = ens.params();
  if (!params.integer_p()) {
    throw Error(ErrorCode::NonIntegerP, "the matrix sampler needs integer p");
  }
  const int p = static_cast<int>(params.p());
  const int q = params.q();
  const int d = params.d();
  std::vector<double> out(static_cast<std::size_t>(q));
  if (d == 4) {
    // a + b j  ->  [[a, b], [-conj(b), conj(a)]]
    CMatrix m(2 * p, 2 * q);
    for (int j = 0; j < q; ++j) {
      for (int i = 0; i < p; ++i) {
        const std::complex<double> a{standard_normal(rng), standard_normal(rng)};
        const std::complex<double> b{standard_normal(rng), standard_normal(rng)};
        m(2 * i, 2 * j) = a;
        m(2 * i, 2 * j + 1) = b;
        m(2 * i + 1, 2 * j) = -std::conj(b);
        m(2 * i + 1, 2 * j + 1) = std::conj(a);
      }
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(m).singularValues();
    for (int i = 0; i < q; ++i) out[static_cast<std::size_t>(i)] = sv(2 * i);
  } else {
    CMatrix m(p, q);
    for (int j = 0; j < q; ++j) {
      for (int i = 0; i < p; ++i) {
        const double re = standard_normal(rng);
        const double im = d == 2 ? standard_normal(rng) : 0.0;
        m(i, j) = {re, im};
      }
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(m).singularValues();
    for (int i = 0; i < q; ++i) out[static_cast<std::size_t>(i)] = sv(i);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return make_chamber_point(std::move(out));
}

GaussianTransformReport gaussian_transform_residual(std::span<const double> lambda,
                                                    const ModelParams& params,
                                                    std::size_t n_samples, std::size_t n_inner,
                                                    std::uint64_t seed, int threads,
                                                    std::size_t batches) {
  if (static_cast<int>(lambda.size()) != params.q()) {
    throw Error(ErrorCode::RankMismatch, "lambda must have q entries");
  }
  if (!params.integer_p()) {
    throw Error(ErrorCode::NonIntegerP, "the Gaussian transform check samples the ensemble");
  }
  if (batches < 2 || n_samples < batches || n_inner < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least 2 batches, one draw per batch");
  }
  GaussianTransformReport report;
  report.lambda.assign(lambda.begin(), lambda.end());
  double norm2 = 0.0;
  for (double v : lambda) norm2 += v * v;
  report.target = std::exp(-norm2 / 2.0);
  report.n_inner = n_inner;
  report.batches = batches;
  report.seed = seed;

  const LaguerreEnsemble ens(params);
  const std::size_t per_batch = n_samples / batches;
  report.n_samples = per_batch * batches;
  std::vector<double> batch_mean(batches, 0.0);
  parallel_chunks(batches, threads, [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    const BesselPool pool(params, n_inner, rng);
    double total = 0.0;
    for (std::size_t i = 0; i < per_batch; ++i) {
      const ChamberPoint x = laguerre_sample(ens, rng);
      total += pool.mean(lambda, x.coords);
    }
    batch_mean[b] = total / static_cast<double>(per_batch);
  });
  const MeanSe stats = mean_se(batch_mean);
  report.estimate = stats.mean;
  report.std_error = stats.std_error;
  report.residual = std::abs(report.estimate - report.target);
  return report;
}

}  // namespace grasswalk
