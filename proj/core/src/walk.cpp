#include "grasswalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grasswalk/bessel.hpp"
#include "grasswalk/error.hpp"
#include "grasswalk/parallel.hpp"
#include "grasswalk/polynomials.hpp"
#include "grasswalk/stats.hpp"

namespace grasswalk {

namespace {

constexpr std::size_t kChunk = 256;

int round_up_even(double v) {
  auto i = static_cast<int>(std::ceil(v));
  return i % 2 == 0 ? i : i + 1;
}

// The step law in a form ready for sampling: basis indices and cumulative mass.
struct StepTable {
  std::vector<std::size_t> index;
  std::vector<double> cumulative;
};

StepTable make_step_table(const WeightMeasure& nu, const Hypergroup& hg) {
  require_probability(nu);
  StepTable table;
  double acc = 0.0;
  for (const auto& [w, m] : nu) {
    if (m <= 0.0) continue;
    table.index.push_back(hg.index(w));
    table.cumulative.push_back(acc += m);
  }
  return table;
}

std::size_t pick(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::size_t step_index(const Hypergroup& hg, std::size_t state, const StepTable& table, Rng& rng) {
  const std::size_t mu = table.index[pick(table.cumulative, uniform01(rng))];
  const LinearizationRow& row = hg.row(state, mu);
  if (row.flagged) {
    throw Error(ErrorCode::InadmissibleRow,
                "row " + to_string(hg.weight(state)) + " x " + to_string(hg.weight(mu)) +
                    " has coefficient " + std::to_string(row.most_negative));
  }
  return row.support[pick(row.cumulative, uniform01(rng))];
}

double euclidean_norm(const Weight& w) {
  double s = 0.0;
  for (int v : w.parts()) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

}  // namespace

int default_degree_cap(const WalkConfig& config) {
  const double s = config.step_law.max_first();
  const double n = config.n_steps;
  return round_up_even(std::min(n * s, 4.0 * std::sqrt(n) * s));
}

int effective_degree_cap(const WalkConfig& config) {
  return config.degree_cap > 0 ? config.degree_cap : default_degree_cap(config);
}

std::shared_ptr<Hypergroup> walk_hypergroup(const WalkConfig& config) {
  return Hypergroup::shared(config.params, effective_degree_cap(config) + config.step_law.max_first(),
                            config.nodes_per_axis);
}

Weight step(const Weight& lambda, const WeightMeasure& nu, const ModelParams& params,
            const QuadratureGrid& grid, Rng& rng) {
  if (grid.rank() != params.q()) throw Error(ErrorCode::RankMismatch, "grid rank differs from q");
  const auto hg = Hypergroup::shared(params, lambda.first() + nu.max_first(), grid.nodes_per_axis());
  const StepTable table = make_step_table(nu, *hg);
  return hg->weight(step_index(*hg, hg->index(lambda), table, rng));
}

WalkSample simulate(const WalkConfig& config, const StepObserver& observer) {
  if (config.n_steps < 0) throw Error(ErrorCode::InvalidArgument, "n_steps must be >= 0");
  if (config.step_law.rank() != config.params.q()) {
    throw Error(ErrorCode::RankMismatch, "step law rank differs from q");
  }
  const int cap = effective_degree_cap(config);
  const auto hg = walk_hypergroup(config);
  const StepTable table = make_step_table(config.step_law, *hg);
  const std::size_t zero = hg->index(Weight::zero(config.params.q()));
  const auto steps = static_cast<std::size_t>(config.n_steps);

  WalkSample sample;
  sample.endpoints.resize(config.n_trajectories);
  if (config.keep_trajectories) sample.trajectories.resize(config.n_trajectories);

  const std::size_t chunks = (config.n_trajectories + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> chunk_sum(chunks);
  std::vector<std::vector<double>> chunk_sq(chunks);
  std::vector<int> chunk_max(chunks, 0);

  parallel_chunks(chunks, config.threads, [&](std::size_t c) {
    std::vector<double> sum(steps + 1, 0.0);
    std::vector<double> sq(steps + 1, 0.0);
    int max_first = 0;
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(begin + kChunk, config.n_trajectories);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = make_stream(config.seed, t);
      std::size_t state = zero;
      std::vector<Weight>* path = config.keep_trajectories ? &sample.trajectories[t] : nullptr;
      if (path) {
        path->reserve(steps + 1);
        path->push_back(hg->weight(state));
      }
      for (std::size_t n = 1; n <= steps; ++n) {
        state = step_index(*hg, state, table, rng);
        const Weight& w = hg->weight(state);
        if (w.first() > cap) {
          throw Error(ErrorCode::DegreeCapExceeded,
                      "trajectory " + std::to_string(t) + " reached " + to_string(w) + " at step " +
                          std::to_string(n) + " (cap " + std::to_string(cap) + ")");
        }
        max_first = std::max(max_first, w.first());
        const double m = hg->moment(state);
        sum[n] += m;
        sq[n] += m * m;
        if (path) path->push_back(w);
        if (observer) observer(t, static_cast<int>(n), w);
      }
      sample.endpoints[t] = hg->weight(state);
    }
    chunk_sum[c] = std::move(sum);
    chunk_sq[c] = std::move(sq);
    chunk_max[c] = max_first;
  });

  std::vector<double> sum(steps + 1, 0.0);
  std::vector<double> sq(steps + 1, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t n = 0; n <= steps; ++n) {
      sum[n] += chunk_sum[c][n];
      sq[n] += chunk_sq[c][n];
    }
    sample.max_first = std::max(sample.max_first, chunk_max[c]);
  }
  const double count = static_cast<double>(config.n_trajectories);
  sample.m_mean.assign(steps + 1, 0.0);
  sample.m_stderr.assign(steps + 1, 0.0);
  if (config.n_trajectories > 0) {
    for (std::size_t n = 0; n <= steps; ++n) {
      const double mean = sum[n] / count;
      sample.m_mean[n] = mean;
      if (config.n_trajectories > 1) {
        const double var = std::max(0.0, (sq[n] - count * mean * mean) / (count - 1.0));
        sample.m_stderr[n] = std::sqrt(var / count);
      }
    }
  }
  return sample;
}

MartingaleReport martingale_check(const WalkSample& sample, double sigma2) {
  MartingaleReport report;
  report.sigma2 = sigma2;
  for (std::size_t n = 1; n < sample.m_mean.size(); ++n) {
    MartingaleRow row;
    row.n = static_cast<int>(n);
    row.mean = sample.m_mean[n];
    row.std_error = sample.m_stderr[n];
    row.expected = static_cast<double>(n) * sigma2;
    row.residual = std::abs(row.mean - row.expected);
    if (row.std_error > 0.0) {
      row.z = row.residual / row.std_error;
    } else {
      row.z = row.residual > 1e-9 * std::max(1.0, row.expected) ? INFINITY : 0.0;
    }
    row.flagged = row.z > 4.0;
    report.any_flagged = report.any_flagged || row.flagged;
    report.rows.push_back(row);
  }
  return report;
}

CltReport clt_experiment(const WalkConfig& config, const CltOptions& options) {
  const int q = config.params.q();
  const auto qs = static_cast<std::size_t>(q);
  const auto hg = walk_hypergroup(config);
  CltReport report;
  report.sigma2 = hg->modified_variance(config.step_law);
  if (!(report.sigma2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "the step law has zero modified variance");
  }
  const WalkSample sample = simulate(config);
  report.max_first = sample.max_first;
  report.scale = std::sqrt(config.n_steps * report.sigma2);

  const std::size_t count = sample.endpoints.size();
  report.samples.resize(count);
  std::vector<std::vector<double>> columns(qs, std::vector<double>(count));
  std::vector<std::vector<double>> squares(qs, std::vector<double>(count));
  std::vector<double> norms(count);
  for (std::size_t t = 0; t < count; ++t) {
    auto& row = report.samples[t];
    row.resize(qs);
    double n2 = 0.0;
    for (std::size_t a = 0; a < qs; ++a) {
      row[a] = sample.endpoints[t][a] / report.scale;
      columns[a][t] = row[a];
      squares[a][t] = row[a] * row[a];
      n2 += row[a] * row[a];
    }
    norms[t] = n2;
  }
  for (std::size_t a = 0; a < qs; ++a) {
    const MeanSe m = mean_se(columns[a]);
    report.mean.push_back(m.mean);
    report.mean_stderr.push_back(m.std_error);
    report.second_moment.push_back(mean_se(squares[a]).mean);
  }
  const MeanSe norm_stats = mean_se(norms);
  report.norm2 = norm_stats.mean;
  report.norm2_stderr = norm_stats.std_error;

  const LaguerreEnsemble ens(config.params);
  if (config.params.integer_p()) {
    report.reference_source = "sampler";
    Rng rng = make_stream(config.seed ^ 0x5DEECE66DULL, 0);
    std::vector<std::vector<double>> ref(qs, std::vector<double>(options.reference_draws));
    std::vector<std::vector<double>> ref_sq(qs, std::vector<double>(options.reference_draws));
    std::vector<double> ref_norm(options.reference_draws);
    for (std::size_t i = 0; i < options.reference_draws; ++i) {
      const ChamberPoint x = laguerre_sample(ens, rng);
      double n2 = 0.0;
      for (std::size_t a = 0; a < qs; ++a) {
        ref[a][i] = x.coords[a];
        ref_sq[a][i] = x.coords[a] * x.coords[a];
        n2 += ref_sq[a][i];
      }
      ref_norm[i] = n2;
    }
    for (std::size_t a = 0; a < qs; ++a) {
      report.reference_mean.push_back(mean_se(ref[a]).mean);
      report.reference_second_moment.push_back(mean_se(ref_sq[a]).mean);
    }
    const MeanSe r = mean_se(ref_norm);
    report.reference_norm2 = r.mean;
    report.reference_norm2_stderr = r.std_error;
  } else {
    report.reference_source = "quadrature";
    report.reference_mean = ens.coordinate_means();
    report.reference_second_moment = ens.coordinate_second_moments();
    report.reference_norm2 = 0.0;
    for (double v : report.reference_second_moment) report.reference_norm2 += v;
  }

  report.moments_ok = true;
  for (std::size_t a = 0; a <= qs; ++a) {
    const double got = a < qs ? report.mean[a] : report.norm2;
    const double want = a < qs ? report.reference_mean[a] : report.reference_norm2;
    const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
    report.relative_errors.push_back(rel);
    report.moments_ok = report.moments_ok && rel < options.moment_tolerance;
  }

  std::vector<double> first = columns[0];
  std::sort(first.begin(), first.end());
  const auto cdf = [&ens](double t) { return ens.first_marginal_cdf(t); };
  report.ks = ks_distance(first, cdf);
  report.lattice_spacing = lattice_spacing(first);
  report.ks_lattice = ks_distance_lattice(first, cdf, report.lattice_spacing);
  report.ks_ok = report.ks < options.ks_tolerance;
  return report;
}

SllnReport slln_check(const WalkConfig& config, double epsilon) {
  if (!(epsilon > 0.5)) throw Error(ErrorCode::InvalidArgument, "epsilon must exceed 1/2");
  SllnReport report;
  report.epsilon = epsilon;
  std::vector<int> ends;
  for (int n = 16; n <= config.n_steps; n *= 2) ends.push_back(n);
  if (ends.empty()) return report;

  const std::size_t blocks = ends.size();
  std::vector<double> stat(config.n_trajectories * blocks, 0.0);
  const auto observer = [&](std::size_t t, int n, const Weight& state) {
    if (n <= 8) return;
    // block b covers (ends[b]/2, ends[b]]
    const auto b = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) - 4;
    if (b >= blocks) return;
    double& slot = stat[t * blocks + b];
    slot = std::max(slot, euclidean_norm(state) / std::pow(static_cast<double>(n), epsilon));
  };
  simulate(config, observer);

  report.decreasing = true;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<double> column(config.n_trajectories);
    for (std::size_t t = 0; t < config.n_trajectories; ++t) column[t] = stat[t * blocks + b];
    std::sort(column.begin(), column.end());
    SllnCheckpoint cp{ends[b], quantile(column, 0.5), quantile(column, 0.9)};
    if (!report.checkpoints.empty() && !(cp.median < report.checkpoints.back().median)) {
      report.decreasing = false;
    }
    report.checkpoints.push_back(cp);
  }
  return report;
}

MehlerHeineReport mehler_heine_experiment(const Weight& lambda,
                                          const std::vector<ChamberPoint>& x_grid,
                                          const ModelParams& params, const std::vector<int>& n_list,
                                          const MehlerHeineOptions& options) {
  const int q = params.q();
  if (lambda.rank() != q) throw Error(ErrorCode::RankMismatch, "weight rank differs from q");
  if (n_list.empty() || x_grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need at least one n and one x");
  }
  MehlerHeineReport report;
  report.n_list = n_list;

  std::vector<double> spectral(lambda.parts().begin(), lambda.parts().end());
  std::vector<McEstimate> reference;
  if (q == 1) {
    for (const auto& x : x_grid) {
      reference.push_back({bessel_eval_rank_one(spectral[0], x.coords[0], params), 0.0, 0.0, 0});
    }
  } else {
    Rng rng = make_stream(options.seed, 0);
    const BesselPool pool(params, options.bessel_samples, rng);
    for (const auto& x : x_grid) reference.push_back(pool.evaluate(spectral, x.coords));
  }

  for (const int n : n_list) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    std::vector<int> scaled(lambda.parts().begin(), lambda.parts().end());
    for (int& v : scaled) v *= n;
    const Weight big = make_weight(scaled);
    if (big.first() > 512) {
      throw Error(ErrorCode::DegreeCapExceeded, "n lambda = " + to_string(big) + " is above 512");
    }
    std::shared_ptr<const JacobiBasis> basis;
    if (q > 1) {
      const int nodes = options.nodes_per_axis > 0 ? options.nodes_per_axis
                                                   : default_nodes_per_axis(params.k(), big.first());
      basis = JacobiBasis::shared(params, big.first(), nodes);
    }
    double sup = -1.0;
    double sup_se = 0.0;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      std::vector<double> y = x_grid[i].coords;
      for (double& v : y) v /= n;
      if (y[0] > std::numbers::pi / 2) {
        throw Error(ErrorCode::NotInChamber, "x/n leaves the alcove");
      }
      MehlerHeinePoint point;
      point.n = n;
      point.x = x_grid[i].coords;
      point.jacobi = q == 1 ? jacobi_eval_rank_one(big, params, y[0])
                            : basis->evaluate(*basis->index_of(big), y);
      point.bessel = reference[i].estimate;
      point.bessel_stderr = reference[i].std_error;
      point.error = std::abs(point.jacobi - point.bessel);
      if (point.bessel_stderr > point.error / 3.0) report.bessel_uncertain = true;
      if (point.error > sup) {
        sup = point.error;
        sup_se = point.bessel_stderr;
      }
      report.points.push_back(std::move(point));
    }
    report.sup_error.push_back(sup);
    report.sup_error_se.push_back(sup_se);
  }
  if (report.bessel_uncertain && options.strict) {
    throw Error(ErrorCode::BesselUncertain,
                "Monte Carlo error of the Bessel reference exceeds a third of a measured error");
  }

  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (report.sup_error[i] > 0.0) {
      lx.push_back(std::log(static_cast<double>(n_list[i])));
      ly.push_back(std::log(report.sup_error[i]));
    }
  }
  if (lx.size() >= 2) report.slope = linear_fit(lx, ly).slope;
  if (report.sup_error.back() > 0.0) {
    report.decay_factor = report.sup_error.front() / report.sup_error.back();
  }
  return report;
}

}  // namespace grasswalk
