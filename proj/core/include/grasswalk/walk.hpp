#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "grasswalk/hypergroup.hpp"
#include "grasswalk/params.hpp"
#include "grasswalk/rng.hpp"
#include "grasswalk/weights.hpp"

namespace grasswalk {

struct WalkConfig {
  ModelParams params;
  WeightMeasure step_law;
  int n_steps = 0;
  std::size_t n_trajectories = 0;
  std::uint64_t seed = 0;
  int degree_cap = 0;      // bound on lambda_1 of visited states; 0 picks default_degree_cap
  int nodes_per_axis = 0;  // 0 picks the quadrature default
  int threads = 1;
  bool keep_trajectories = false;
};

/// min(n * s, 4 sqrt(n) s) rounded up to even, s = largest first entry in supp(nu).
int default_degree_cap(const WalkConfig& config);
/// The degree cap actually used (explicit or default).
int effective_degree_cap(const WalkConfig& config);

/// Shared hypergroup large enough for every row a walk under `config` can
/// request: degree cap = state cap + max first entry of the step law.
std::shared_ptr<Hypergroup> walk_hypergroup(const WalkConfig& config);

struct WalkSample {
  std::vector<Weight> endpoints;
  std::vector<std::vector<Weight>> trajectories;  // S_0 .. S_n when kept
  std::vector<double> m_mean;    // index n = 0 .. n_steps
  std::vector<double> m_stderr;  // standard error of m_mean[n]
  int max_first = 0;             // largest lambda_1 visited
};

/// One transition: mu ~ nu, then tau ~ delta_lambda * delta_mu.
/// Throws InadmissibleRow, DegreeCapExceeded.
Weight step(const Weight& lambda, const WeightMeasure& nu, const ModelParams& params,
            const QuadratureGrid& grid, Rng& rng);

/// Called once per trajectory and step (n = 1 .. n_steps) from worker threads;
/// implementations must only touch per-trajectory state.
using StepObserver = std::function<void(std::size_t trajectory, int n, const Weight& state)>;

/// Trajectories start at 0 and use RNG stream (seed, trajectory index); they
/// are processed in fixed chunks of 256 whose partial sums are combined in
/// chunk order, so the result is bit-identical for any thread count.
/// Throws DegreeCapExceeded, InadmissibleRow.
WalkSample simulate(const WalkConfig& config, const StepObserver& observer = {});

struct MartingaleRow {
  int n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double expected = 0.0;
  double residual = 0.0;
  double z = 0.0;
  bool flagged = false;
};

struct MartingaleReport {
  double sigma2 = 0.0;
  std::vector<MartingaleRow> rows;  // n = 1 .. n_steps
  bool any_flagged = false;
};

/// Compares mean m(S_n) with n sigma^2; flags |z| > 4.
MartingaleReport martingale_check(const WalkSample& sample, double sigma2);

struct CltOptions {
  std::size_t reference_draws = 100000;
  double ks_tolerance = 0.02;
  double moment_tolerance = 0.10;
};

struct CltReport {
  double sigma2 = 0.0;
  double scale = 0.0;  // sqrt(n sigma^2)
  std::vector<std::vector<double>> samples;  // rescaled endpoints
  std::vector<double> mean;
  std::vector<double> mean_stderr;
  std::vector<double> second_moment;
  double norm2 = 0.0;  // E[x_1^2 + ... + x_q^2]
  double norm2_stderr = 0.0;
  std::string reference_source;  // "sampler" or "quadrature"
  std::vector<double> reference_mean;
  std::vector<double> reference_second_moment;
  double reference_norm2 = 0.0;
  double reference_norm2_stderr = 0.0;
  std::vector<double> relative_errors;  // E x_1 .. E x_q, E|x|^2
  double ks = 0.0;
  double ks_lattice = 0.0;
  double lattice_spacing = 0.0;
  bool ks_ok = false;
  bool moments_ok = false;
  int max_first = 0;
};

/// Rescales endpoints by 1 / sqrt(n sigma^2) and compares them with the
/// Laguerre ensemble: moments against the matrix sampler (integer p) or the
/// density (other p), and the KS distance of the first coordinate against
/// the density's marginal CDF.
CltReport clt_experiment(const WalkConfig& config, const CltOptions& options = {});

struct SllnCheckpoint {
  int n = 0;  // block (n/2, n]
  double median = 0.0;
  double q90 = 0.0;
};

struct SllnReport {
  double epsilon = 0.0;
  std::vector<SllnCheckpoint> checkpoints;
  bool decreasing = false;  // medians strictly decreasing
};

/// Per trajectory, the maximum of |S_k| / k^epsilon over each dyadic block
/// (n/2, n], n = 16, 32, ... <= n_steps; cross-trajectory quantiles per block.
/// Throws InvalidArgument unless epsilon > 1/2.
SllnReport slln_check(const WalkConfig& config, double epsilon);

struct MehlerHeineOptions {
  std::size_t bessel_samples = 1000000;
  std::uint64_t seed = 1;
  int nodes_per_axis = 0;
  bool strict = true;  // throw BesselUncertain instead of only flagging
};

struct MehlerHeinePoint {
  int n = 0;
  std::vector<double> x;
  double jacobi = 0.0;
  double bessel = 0.0;
  double bessel_stderr = 0.0;
  double error = 0.0;
};

struct MehlerHeineReport {
  std::vector<MehlerHeinePoint> points;
  std::vector<int> n_list;
  std::vector<double> sup_error;       // per n over the x grid
  std::vector<double> sup_error_se;    // MC error of the maximizing point
  double slope = 0.0;                  // fit of log sup_error against log n
  double decay_factor = 0.0;           // sup_error(first n) / sup_error(last n)
  bool bessel_uncertain = false;
};

/// |R_{n lambda}(x/n) - Bessel_lambda(x)| over x_grid and n_list. Rank one
/// uses the closed forms on both sides; higher rank uses the orbit expansion
/// and a Monte Carlo Bessel reference shared across all points.
/// Throws DegreeCapExceeded (n lambda_1 > 512), BesselUncertain (strict).
MehlerHeineReport mehler_heine_experiment(const Weight& lambda,
                                          const std::vector<ChamberPoint>& x_grid,
                                          const ModelParams& params, const std::vector<int>& n_list,
                                          const MehlerHeineOptions& options = {});

}  // namespace grasswalk
