#include "grasswalk/integral_rep.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "grasswalk/error.hpp"
#include "grasswalk/stats.hpp"

namespace grasswalk {

namespace {

void require_real_or_complex(int d) {
  if (d == 4) {
    throw Error(ErrorCode::UnsupportedAlgebra,
                "quaternionic matrices are not supported by the Monte Carlo path");
  }
  if (d != 1 && d != 2) throw Error(ErrorCode::InvalidArgument, "d must be 1 or 2");
}

CMatrix gaussian_matrix(int rows, int cols, int d, Rng& rng) {
  CMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = standard_normal(rng);
      const double im = d == 2 ? standard_normal(rng) : 0.0;
      g(i, j) = {re, im};
    }
  }
  return g;
}

// First `cols` columns of a Haar unitary of size rows.
CMatrix haar_columns(int rows, int cols, int d, Rng& rng) {
  const CMatrix g = gaussian_matrix(rows, cols, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix qmat = qr.householderQ() * CMatrix::Identity(rows, cols);
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < cols; ++j) {
    const std::complex<double> diag = r(j, j);
    const double mag = std::abs(diag);
    const std::complex<double> phase = mag > 0.0 ? diag / mag : std::complex<double>(1.0, 0.0);
    qmat.col(j) *= phase;
  }
  return qmat;
}

}  // namespace

CMatrix sample_haar_unitary(int q, int d, Rng& rng) {
  require_real_or_complex(d);
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "q must be >= 1");
  return haar_columns(q, q, d, rng);
}

MatrixBallSampler::MatrixBallSampler(const ModelParams& params) : params_(params) {
  require_real_or_complex(params.d());
  if (params.integer_p()) return;
  if (params.p() <= 2.0 * params.q() - 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                "non-integer p must exceed 2q - 1 for the matrix-ball density");
  }
  metropolis_ = true;
  exponent_ = params.p() * params.d() / 2.0 - params.gamma();
  state_ = CMatrix::Zero(params.q(), params.q());
  state_log_ = 0.0;
}

double MatrixBallSampler::acceptance_rate() const noexcept {
  return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposed_);
}

double MatrixBallSampler::log_target(const CMatrix& w) const {
  const int q = params_.q();
  const CMatrix m = CMatrix::Identity(q, q) - w.adjoint() * w;
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success) return -INFINITY;
  double log_det = 0.0;
  for (int i = 0; i < q; ++i) {
    const double l = llt.matrixLLT()(i, i).real();
    if (!(l > 0.0)) return -INFINITY;
    log_det += 2.0 * std::log(l);
  }
  return exponent_ * log_det;
}

bool MatrixBallSampler::propose(Rng& rng) {
  const int q = params_.q();
  CMatrix candidate = state_ + step_ * gaussian_matrix(q, q, params_.d(), rng);
  const double log_c = log_target(candidate);
  ++proposed_;
  if (!std::isfinite(log_c)) return false;
  const double u = uniform01(rng);
  if (u > 0.0 && std::log(u) < log_c - state_log_) {
    state_ = std::move(candidate);
    state_log_ = log_c;
    ++accepted_;
    return true;
  }
  return false;
}

void MatrixBallSampler::burn_in(Rng& rng) {
  constexpr int kWindow = 100;
  constexpr int kBurnIn = 1000;
  constexpr int kMaxWindows = 60;
  int stable = 0;
  int windows = 0;
  // Tune in windows of 100 steps; count at least 1000 steps after the last
  // adjustment that left the rate inside [0.2, 0.5].
  while (stable < kBurnIn / kWindow) {
    if (++windows > kMaxWindows) {
      throw Error(ErrorCode::NotConverged, "Metropolis step size did not settle (acceptance " +
                                               std::to_string(acceptance_rate()) + ")");
    }
    int acc = 0;
    for (int i = 0; i < kWindow; ++i) acc += propose(rng) ? 1 : 0;
    const double rate = static_cast<double>(acc) / kWindow;
    if (rate < 0.2) {
      step_ *= 0.7;
      stable = 0;
    } else if (rate > 0.5) {
      step_ *= 1.4;
      stable = 0;
    } else {
      ++stable;
    }
  }
  proposed_ = 0;
  accepted_ = 0;
  warmed_ = true;
}

CMatrix MatrixBallSampler::draw(Rng& rng) {
  const int q = params_.q();
  if (!metropolis_) {
    const int p = static_cast<int>(params_.p());
    return haar_columns(p, q, params_.d(), rng).topRows(q);
  }
  if (!warmed_) burn_in(rng);
  for (int i = 0; i < 10; ++i) propose(rng);
  return state_;
}

CMatrix sample_mp(const ModelParams& params, Rng& rng) {
  MatrixBallSampler sampler(params);
  return sampler.draw(rng);
}

std::complex<double> power_function(const CMatrix& a, std::span<const int> exponents) {
  const auto q = static_cast<Eigen::Index>(exponents.size());
  if (a.rows() != q || a.cols() != q) {
    throw Error(ErrorCode::InvalidArgument, "power_function: matrix size differs from rank");
  }
  std::complex<double> value = 1.0;
  for (Eigen::Index r = 1; r <= q; ++r) {
    const int next = r < q ? exponents[static_cast<std::size_t>(r)] : 0;
    const int power = exponents[static_cast<std::size_t>(r - 1)] - next;
    if (power == 0) continue;
    const std::complex<double> minor = r == 1 ? a(0, 0) : a.topLeftCorner(r, r).determinant();
    if (power < 0 && minor == 0.0) {
      throw Error(ErrorCode::SingularMinor, "zero principal minor raised to a negative power");
    }
    std::complex<double> term = 1.0;
    std::complex<double> base = power > 0 ? minor : 1.0 / minor;
    for (int e = std::abs(power); e > 0; e >>= 1) {
      if (e & 1) term *= base;
      base *= base;
    }
    value *= term;
  }
  return value;
}

McEstimate jacobi_eval_mc(const Weight& lambda, const ModelParams& params, const ChamberPoint& x,
                          std::size_t n_samples, Rng& rng) {
  require_real_or_complex(params.d());
  const int q = params.q();
  if (lambda.rank() != q || x.rank() != q) {
    throw Error(ErrorCode::RankMismatch, "weight, point and params must share q");
  }
  if (!x.in_alcove()) throw Error(ErrorCode::NotInChamber, "x must lie in the alcove");
  bool zero_x = true;
  for (double v : x.coords) zero_x = zero_x && v == 0.0;
  if (zero_x || lambda.is_zero()) return {1.0, 0.0, 0.0, n_samples};
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");

  std::vector<int> half(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) half[static_cast<std::size_t>(i)] = lambda[static_cast<std::size_t>(i)] / 2;

  CMatrix cos_x = CMatrix::Zero(q, q);
  CMatrix isin_x = CMatrix::Zero(q, q);
  for (int i = 0; i < q; ++i) {
    cos_x(i, i) = std::cos(x.coords[static_cast<std::size_t>(i)]);
    isin_x(i, i) = {0.0, std::sin(x.coords[static_cast<std::size_t>(i)])};
  }

  MatrixBallSampler ball(params);
  std::vector<double> values(n_samples);
  double sum_im = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const CMatrix w = ball.draw(rng);
    const CMatrix u = sample_haar_unitary(q, params.d(), rng);
    const CMatrix left = cos_x + w.adjoint() * isin_x;
    const CMatrix right = cos_x + isin_x * w;
    const CMatrix g = u.adjoint() * left * right * u;
    const std::complex<double> v = power_function(g, half);
    values[s] = v.real();
    sum_im += v.imag();
  }
  // Chain draws are correlated, so the Metropolis path uses batch means.
  const MeanSe stats = ball.uses_metropolis() ? batch_means(values, 20) : mean_se(values);
  McEstimate out{stats.mean, stats.std_error, sum_im / static_cast<double>(n_samples), n_samples};
  return out;
}

}  // namespace grasswalk
