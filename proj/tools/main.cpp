#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "commands.hpp"
#include "experiment_config.hpp"
#include "grasswalk/error.hpp"
#include "output.hpp"

namespace cli = grasswalk::cli;
using grasswalk::Error;
using grasswalk::ErrorCode;

namespace {

void print_error(std::string_view code, const std::string& message) {
  std::cout << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
}

void add_common(CLI::App* sub, cli::CommonArgs& c) {
  sub->add_option("--d", c.d, "Real dimension of the field: 1, 2 or 4")->capture_default_str();
  sub->add_option("--p", c.p, "Parameter p >= q")->capture_default_str();
  sub->add_option("--q", c.q, "Rank")->capture_default_str();
  sub->add_option("--nodes", c.nodes, "Quadrature nodes per axis (0: automatic)")->capture_default_str();
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
  sub->add_option("--cache-dir", c.cache_dir, "Coefficient cache directory");
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--config", "Flat key=value configuration file");
}

std::string key_of(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() ? std::string() : names.front();
}

// Appends settings from --config for every option not given on the command
// line. Returns the rewritten argument list.
std::vector<std::string> merge_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.size() < 2) return args;
  const CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && !sub; ++i) {
    if (!args[i].empty() && args[i][0] != '-') sub = app.get_subcommand_no_throw(args[i]);
  }
  if (!sub) return args;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto config = cli::ExperimentConfig::read(path);
  for (const auto& [key, value] : config.entries()) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || key == "config") {
      throw Error(ErrorCode::ParseError, "unknown config key '" + key + "' for " + sub->get_name());
    }
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
    });
    if (!given) args.push_back("--" + key + "=" + value);
  }
  return args;
}

cli::ExperimentConfig effective_config(const CLI::App* sub) {
  cli::ExperimentConfig config;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string key = key_of(opt);
    if (key.empty() || key == "help" || key == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
    } else {
      value = opt->get_default_str();
    }
    if (opt->count() == 0 && value.empty()) continue;
    config.set(key, value);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi polynomials of type BC, hypergroup random walks and their limits"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  cli::CommonArgs common;
  cli::EvalArgs eval;
  cli::LinearizeArgs lin;
  cli::WalkArgs walk;
  cli::CltArgs clt;
  cli::MehlerHeineArgs mh;
  cli::LaguerreArgs lag;

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a Jacobi polynomial or Bessel function");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--kind", eval.kind, "jacobi | jacobi-mc | bessel | bessel-mc")
      ->capture_default_str()
      ->check(CLI::IsMember({"jacobi", "jacobi-mc", "bessel", "bessel-mc"}));
  eval_cmd->add_option("--lambda", eval.lambda, "Weight (jacobi) or spectral point (bessel)")->required();
  eval_cmd->add_option("--x", eval.x, "Point, comma separated")->required();
  eval_cmd->add_option("--samples", eval.samples, "Monte Carlo samples")->capture_default_str();

  auto* lin_cmd = app.add_subcommand("linearize", "Linearization coefficients of R_lambda R_mu");
  add_common(lin_cmd, common);
  lin_cmd->add_option("--lambda", lin.lambda)->required();
  lin_cmd->add_option("--mu", lin.mu)->required();

  auto* walk_cmd = app.add_subcommand("walk", "Simulate the random walk");
  add_common(walk_cmd, common);
  walk_cmd->add_option("--nu", walk.nu, "Step law, e.g. \"2,0:0.5;2,2:0.5\"")->required();
  walk_cmd->add_option("--n", walk.n, "Steps")->capture_default_str();
  walk_cmd->add_option("--traj", walk.traj, "Trajectories")->capture_default_str();
  walk_cmd->add_option("--degree-cap", walk.degree_cap, "Bound on lambda_1 (0: default)")->capture_default_str();
  walk_cmd->add_option("--keep-trajectories", walk.keep_trajectories, "Write full paths (0/1)")
      ->capture_default_str();

  auto* clt_cmd = app.add_subcommand("clt", "Central limit experiment against the Laguerre ensemble");
  add_common(clt_cmd, common);
  clt_cmd->add_option("--nu", clt.nu)->required();
  clt_cmd->add_option("--n", clt.n)->capture_default_str();
  clt_cmd->add_option("--traj", clt.traj)->capture_default_str();
  clt_cmd->add_option("--degree-cap", clt.degree_cap)->capture_default_str();
  clt_cmd->add_option("--ref-draws", clt.ref_draws, "Ensemble reference draws")->capture_default_str();
  clt_cmd->add_option("--ks-tol", clt.ks_tol)->capture_default_str();
  clt_cmd->add_option("--moment-tol", clt.moment_tol)->capture_default_str();
  clt_cmd->add_option("--gate", clt.gate, "auto | ks | moments | both")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "ks", "moments", "both"}));

  auto* mh_cmd = app.add_subcommand("mehler-heine", "Error table of R_{n lambda}(x/n) against the Bessel limit");
  add_common(mh_cmd, common);
  mh_cmd->add_option("--lambda", mh.lambda)->required();
  mh_cmd->add_option("--x", mh.x, "Points separated by ';', coordinates by ','")->required();
  mh_cmd->add_option("--n-list", mh.n_list)->capture_default_str();
  mh_cmd->add_option("--samples", mh.samples, "Bessel Monte Carlo samples (q > 1)")->capture_default_str();
  mh_cmd->add_option("--max-slope", mh.max_slope, "Tolerance on the fitted slope")->capture_default_str();

  auto* lag_cmd = app.add_subcommand("laguerre", "Sample the Laguerre ensemble");
  add_common(lag_cmd, common);
  lag_cmd->add_option("--draws", lag.draws)->capture_default_str();
  lag_cmd->add_option("--transform-lambda", lag.transform_lambda,
                      "Also check the Gaussian transform at this spectral point");
  lag_cmd->add_option("--inner", lag.inner, "Bessel samples per batch")->capture_default_str();
  lag_cmd->add_option("--batches", lag.batches)->capture_default_str();

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = merge_config(app, std::move(args));
  } catch (const Error& e) {
    print_error(grasswalk::to_string(e.code()), e.what());
    return cli::kExitError;
  }
  std::vector<char*> raw;
  for (auto& a : args) raw.push_back(a.data());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("ParseError", e.what());
    return cli::kExitError;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const cli::ExperimentConfig config = effective_config(sub);
    std::filesystem::create_directories(common.out);
    cli::write_text(std::filesystem::path(common.out) / "config.echo", config.to_text());
    nlohmann::json echo = nlohmann::json::object();
    echo["command"] = sub->get_name();
    for (const auto& [k, v] : config.entries()) echo[k] = v;

    const std::string name = sub->get_name();
    if (name == "eval") return cli::run_eval(common, eval, echo);
    if (name == "linearize") return cli::run_linearize(common, lin, echo);
    if (name == "walk") return cli::run_walk(common, walk, echo);
    if (name == "clt") return cli::run_clt(common, clt, echo);
    if (name == "mehler-heine") return cli::run_mehler_heine(common, mh, echo);
    return cli::run_laguerre(common, lag, echo);
  } catch (const Error& e) {
    print_error(grasswalk::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    print_error("IoError", e.what());
  }
  return cli::kExitError;
}
