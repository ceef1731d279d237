#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "grasswalk/bessel.hpp"
#include "grasswalk/error.hpp"
#include "grasswalk/hypergroup.hpp"
#include "grasswalk/integral_rep.hpp"
#include "grasswalk/params.hpp"
#include "grasswalk/polynomials.hpp"
#include "grasswalk/quadrature.hpp"
#include "grasswalk/rng.hpp"
#include "grasswalk/walk.hpp"
#include "grasswalk/weights.hpp"
#include "output.hpp"

namespace grasswalk::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    std::string item(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    out.push_back(first == std::string::npos ? std::string() : item.substr(first, last - first + 1));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
  }
  if (used != s.size()) throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_numbers(std::string_view text, int rank) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(item));
  if (rank > 0 && static_cast<int>(out.size()) != rank) {
    throw Error(ErrorCode::RankMismatch, "expected " + std::to_string(rank) + " coordinates in '" +
                                             std::string(text) + "'");
  }
  return out;
}

std::vector<int> parse_ints(std::string_view text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    const double v = parse_number(item);
    if (v != std::floor(v) || v < 1) throw Error(ErrorCode::ParseError, "expected a positive integer: '" + item + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void require_positive(std::size_t v, const char* name) {
  if (v == 0) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
}

ModelParams make_params(const CommonArgs& c) { return ModelParams::make(c.d, c.p, c.q); }

fs::path out_dir(const CommonArgs& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

json vec(const std::vector<double>& v) { return json(v); }

void summary(const json& j) { std::cout << j.dump() << std::endl; }

// Loads cached linearization rows before a run and writes them back after.
class CacheSession {
 public:
  CacheSession(const std::shared_ptr<Hypergroup>& hg, const std::string& flag)
      : hg_(hg), file_(resolve_cache_dir(flag) / hg->cache_file_name()) {
    if (fs::exists(file_)) {
      try {
        loaded_ = hg_->load(file_);
      } catch (const Error& e) {
        std::cerr << "ignoring unreadable cache " << file_ << ": " << e.what() << '\n';
      }
    }
  }
  void save() const {
    fs::create_directories(file_.parent_path());
    hg_->save(file_);
  }
  std::size_t loaded() const noexcept { return loaded_; }
  const fs::path& file() const noexcept { return file_; }

 private:
  std::shared_ptr<Hypergroup> hg_;
  fs::path file_;
  std::size_t loaded_ = 0;
};

WalkConfig walk_config(const CommonArgs& c, const std::string& nu, int n, std::size_t traj,
                       int degree_cap, bool keep) {
  WalkConfig config{make_params(c), parse_measure(nu, c.q), n, traj, c.seed, degree_cap, c.nodes,
                    c.threads, keep};
  require_probability(config.step_law);
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "--n must be non-negative");
  if (c.threads < 1) throw Error(ErrorCode::InvalidArgument, "--threads must be positive");
  require_positive(traj, "--traj");
  return config;
}

}  // namespace

fs::path resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GRASSWALK_CACHE"); env && *env) return env;
  return fs::path(".cache") / "coeffs";
}

int run_eval(const CommonArgs& common, const EvalArgs& args, const json& config) {
  const ModelParams params = make_params(common);
  const std::vector<double> x = parse_numbers(args.x, params.q());
  json result;
  if (args.kind == "jacobi" || args.kind == "jacobi-mc") {
    const Weight lambda = parse_weight(args.lambda, params.q());
    const ChamberPoint point = make_chamber_point(x);
    if (args.kind == "jacobi") {
      if (params.q() == 1) {
        result["value"] = jacobi_eval_rank_one(lambda, params, x[0]);
      } else {
        const int nodes = common.nodes > 0 ? common.nodes
                                           : default_nodes_per_axis(params.k(), lambda.first());
        const auto expansion = jacobi_expand(lambda, params, make_grid(params.q(), nodes, params.k()));
        result["value"] = jacobi_eval(expansion, point);
      }
    } else {
      require_positive(args.samples, "--samples");
      Rng rng = make_stream(common.seed, 0);
      const McEstimate est = jacobi_eval_mc(lambda, params, point, args.samples, rng);
      result = {{"value", est.estimate}, {"stderr", est.std_error}, {"imag", est.imag_mean},
                {"n", est.n}};
    }
  } else {
    const std::vector<double> lambda = parse_numbers(args.lambda, params.q());
    const ChamberPoint point = make_chamber_point(x);
    if (args.kind == "bessel" && params.q() == 1) {
      result["value"] = bessel_eval_rank_one(lambda[0], x[0], params);
    } else {
      require_positive(args.samples, "--samples");
      Rng rng = make_stream(common.seed, 0);
      const McEstimate est = bessel_eval_mc(lambda, point, params, args.samples, rng);
      result = {{"value", est.estimate}, {"stderr", est.std_error}, {"imag", est.imag_mean},
                {"n", est.n}};
    }
  }
  summary(result);
  (void)config;
  return kExitPass;
}

int run_linearize(const CommonArgs& common, const LinearizeArgs& args, const json& config) {
  const ModelParams params = make_params(common);
  const Weight lambda = parse_weight(args.lambda, params.q());
  const Weight mu = parse_weight(args.mu, params.q());
  const auto hg = Hypergroup::shared(params, lambda.first() + mu.first(), common.nodes);
  CacheSession cache(hg, common.cache_dir);
  const LinearizationRow& row = hg->row(lambda, mu);

  const fs::path dir = out_dir(common);
  CsvWriter csv(dir / "linearize.csv", {"lambda", "mu", "tau", "c"});
  json terms = json::array();
  for (std::size_t i = 0; i < row.support.size(); ++i) {
    const std::string tau = to_string(hg->weight(row.support[i]));
    csv.row({to_string(lambda), to_string(mu), tau, format_double(row.coeffs[i])});
    terms.push_back({{"tau", tau}, {"c", row.coeffs[i]}});
  }
  csv.close();
  cache.save();

  json report = {{"config", config},
                 {"lambda", to_string(lambda)},
                 {"mu", to_string(mu)},
                 {"terms", terms},
                 {"raw_sum", row.raw_sum},
                 {"most_negative", row.most_negative},
                 {"outside_support", row.outside_support},
                 {"admissible", !row.flagged},
                 {"signature", hg->signature()}};
  if (row.flagged) report["most_negative_tau"] = to_string(hg->weight(row.most_negative_tau));
  write_json(dir / "linearize.json", report);
  summary({{"command", "linearize"}, {"terms", row.support.size()}, {"admissible", !row.flagged}});
  return kExitPass;
}

int run_walk(const CommonArgs& common, const WalkArgs& args, const json& config) {
  const WalkConfig wc = walk_config(common, args.nu, args.n, args.traj, args.degree_cap,
                                    args.keep_trajectories != 0);
  const auto hg = walk_hypergroup(wc);
  CacheSession cache(hg, common.cache_dir);
  const WalkSample sample = simulate(wc);
  cache.save();
  const double sigma2 = hg->modified_variance(wc.step_law);
  const MartingaleReport mart = martingale_check(sample, sigma2);

  const fs::path dir = out_dir(common);
  {
    CsvWriter csv(dir / "endpoints.csv", {"trajectory", "lambda"});
    for (std::size_t t = 0; t < sample.endpoints.size(); ++t) {
      csv.row({std::to_string(t), to_string(sample.endpoints[t])});
    }
    csv.close();
  }
  {
    CsvWriter csv(dir / "m_trace.csv", {"n", "mean", "stderr", "expected", "z"});
    csv.row({"0", format_double(sample.m_mean[0]), format_double(sample.m_stderr[0]), "0", "0"});
    for (const auto& r : mart.rows) {
      csv.row({std::to_string(r.n), format_double(r.mean), format_double(r.std_error),
               format_double(r.expected), format_double(r.z)});
    }
    csv.close();
  }
  if (wc.keep_trajectories) {
    CsvWriter csv(dir / "trajectories.csv", {"trajectory", "n", "lambda"});
    for (std::size_t t = 0; t < sample.trajectories.size(); ++t) {
      for (std::size_t n = 0; n < sample.trajectories[t].size(); ++n) {
        csv.row({std::to_string(t), std::to_string(n), to_string(sample.trajectories[t][n])});
      }
    }
    csv.close();
  }

  double worst_z = 0.0;
  for (const auto& r : mart.rows) worst_z = std::max(worst_z, std::abs(r.z));
  write_json(dir / "walk.json", {{"config", config},
                                 {"seed", common.seed},
                                 {"degree_cap", effective_degree_cap(wc)},
                                 {"sigma2", sigma2},
                                 {"max_first", sample.max_first},
                                 {"martingale_flagged", mart.any_flagged},
                                 {"martingale_max_z", worst_z},
                                 {"cache_rows_loaded", cache.loaded()},
                                 {"signature", hg->signature()}});
  summary({{"command", "walk"}, {"trajectories", sample.endpoints.size()}, {"sigma2", sigma2},
           {"max_first", sample.max_first}, {"martingale_flagged", mart.any_flagged}});
  return mart.any_flagged ? kExitTolerance : kExitPass;
}

int run_clt(const CommonArgs& common, const CltArgs& args, const json& config) {
  const WalkConfig wc = walk_config(common, args.nu, args.n, args.traj, args.degree_cap, false);
  require_positive(args.ref_draws, "--ref-draws");
  const auto hg = walk_hypergroup(wc);
  CacheSession cache(hg, common.cache_dir);
  const CltReport r = clt_experiment(wc, {args.ref_draws, args.ks_tol, args.moment_tol});
  cache.save();

  const int q = wc.params.q();
  const fs::path dir = out_dir(common);
  std::vector<std::string> header;
  for (int i = 1; i <= q; ++i) header.push_back("x" + std::to_string(i));
  CsvWriter csv(dir / "clt_samples.csv", header);
  for (const auto& s : r.samples) {
    std::vector<std::string> fields;
    for (double v : s) fields.push_back(format_double(v));
    csv.row(fields);
  }
  csv.close();

  const std::string gate = args.gate == "auto" ? (q == 1 ? "ks" : "moments") : args.gate;
  bool pass = true;
  if (gate == "ks" || gate == "both") pass = pass && r.ks_ok;
  if (gate == "moments" || gate == "both") pass = pass && r.moments_ok;

  write_json(dir / "clt.json", {{"config", config},
                                {"seed", common.seed},
                                {"degree_cap", effective_degree_cap(wc)},
                                {"sigma2", r.sigma2},
                                {"scale", r.scale},
                                {"mean", vec(r.mean)},
                                {"mean_stderr", vec(r.mean_stderr)},
                                {"second_moment", vec(r.second_moment)},
                                {"norm2", r.norm2},
                                {"norm2_stderr", r.norm2_stderr},
                                {"reference_source", r.reference_source},
                                {"reference_mean", vec(r.reference_mean)},
                                {"reference_second_moment", vec(r.reference_second_moment)},
                                {"reference_norm2", r.reference_norm2},
                                {"relative_errors", vec(r.relative_errors)},
                                {"ks", r.ks},
                                {"ks_lattice", r.ks_lattice},
                                {"lattice_spacing", r.lattice_spacing},
                                {"ks_ok", r.ks_ok},
                                {"moments_ok", r.moments_ok},
                                {"gate", gate},
                                {"pass", pass},
                                {"max_first", r.max_first}});
  summary({{"command", "clt"}, {"ks", r.ks}, {"ks_lattice", r.ks_lattice}, {"mean", vec(r.mean)},
           {"relative_errors", vec(r.relative_errors)}, {"gate", gate}, {"pass", pass}});
  return pass ? kExitPass : kExitTolerance;
}

int run_mehler_heine(const CommonArgs& common, const MehlerHeineArgs& args, const json& config) {
  const ModelParams params = make_params(common);
  const Weight lambda = parse_weight(args.lambda, params.q());
  std::vector<ChamberPoint> grid;
  for (const auto& item : split(args.x, ';')) {
    if (!item.empty()) grid.push_back(make_chamber_point(parse_numbers(item, params.q())));
  }
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "--x lists no points");
  const std::vector<int> n_list = parse_ints(args.n_list);
  MehlerHeineOptions options;
  options.bessel_samples = args.samples;
  options.seed = common.seed;
  options.nodes_per_axis = common.nodes;
  options.strict = false;
  const MehlerHeineReport r = mehler_heine_experiment(lambda, grid, params, n_list, options);

  const fs::path dir = out_dir(common);
  std::vector<std::string> header{"n"};
  for (int i = 1; i <= params.q(); ++i) header.push_back("x" + std::to_string(i));
  for (const char* h : {"jacobi", "bessel", "bessel_stderr", "err"}) header.emplace_back(h);
  CsvWriter csv(dir / "mehler_heine.csv", header);
  for (const auto& pt : r.points) {
    std::vector<std::string> fields{std::to_string(pt.n)};
    for (double v : pt.x) fields.push_back(format_double(v));
    for (double v : {pt.jacobi, pt.bessel, pt.bessel_stderr, pt.error}) {
      fields.push_back(format_double(v));
    }
    csv.row(fields);
  }
  csv.close();

  const bool pass = r.slope <= args.max_slope && !r.bessel_uncertain;
  write_json(dir / "mehler_heine.json", {{"config", config},
                                         {"seed", common.seed},
                                         {"n_list", r.n_list},
                                         {"sup_error", vec(r.sup_error)},
                                         {"sup_error_stderr", vec(r.sup_error_se)},
                                         {"slope", r.slope},
                                         {"decay_factor", r.decay_factor},
                                         {"bessel_uncertain", r.bessel_uncertain},
                                         {"pass", pass}});
  summary({{"command", "mehler-heine"}, {"slope", r.slope}, {"decay_factor", r.decay_factor},
           {"bessel_uncertain", r.bessel_uncertain}, {"pass", pass}});
  return pass ? kExitPass : kExitTolerance;
}

int run_laguerre(const CommonArgs& common, const LaguerreArgs& args, const json& config) {
  const ModelParams params = make_params(common);
  require_positive(args.draws, "--draws");
  const LaguerreEnsemble ens(params);
  const fs::path dir = out_dir(common);

  std::vector<std::string> header;
  for (int i = 1; i <= params.q(); ++i) header.push_back("x" + std::to_string(i));
  CsvWriter csv(dir / "laguerre.csv", header);
  Rng rng = make_stream(common.seed, 0);
  for (std::size_t i = 0; i < args.draws; ++i) {
    const ChamberPoint x = laguerre_sample(ens, rng);
    std::vector<std::string> fields;
    for (double v : x.coords) fields.push_back(format_double(v));
    csv.row(fields);
  }
  csv.close();

  json report = {{"config", config}, {"seed", common.seed}, {"draws", args.draws}};
  bool pass = true;
  if (!args.transform_lambda.empty()) {
    const std::vector<double> lambda = parse_numbers(args.transform_lambda, params.q());
    require_positive(args.inner, "--inner");
    require_positive(args.batches, "--batches");
    const GaussianTransformReport g = gaussian_transform_residual(
        lambda, params, args.draws, args.inner, common.seed, common.threads, args.batches);
    pass = g.residual < 3.0 * g.std_error;
    report["transform"] = {{"lambda", vec(g.lambda)},     {"target", g.target},
                           {"estimate", g.estimate},      {"stderr", g.std_error},
                           {"residual", g.residual},      {"n_samples", g.n_samples},
                           {"n_inner", g.n_inner},        {"batches", g.batches},
                           {"seed", g.seed},              {"pass", pass}};
  }
  write_json(dir / "laguerre.json", report);
  json line = {{"command", "laguerre"}, {"draws", args.draws}, {"pass", pass}};
  if (report.contains("transform")) line["residual"] = report["transform"]["residual"];
  summary(line);
  return pass ? kExitPass : kExitTolerance;
}

}  // namespace grasswalk::cli
