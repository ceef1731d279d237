#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace grasswalk::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTolerance = 2;

struct CommonArgs {
  int d = 1;
  double p = 1.0;
  int q = 1;
  int nodes = 0;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string cache_dir;
  std::string out = ".";
};

struct EvalArgs {
  std::string kind = "jacobi";
  std::string lambda;
  std::string x;
  std::size_t samples = 100000;
};

struct LinearizeArgs {
  std::string lambda;
  std::string mu;
};

struct WalkArgs {
  std::string nu;
  int n = 1;
  std::size_t traj = 1000;
  int degree_cap = 0;
  int keep_trajectories = 0;
};

struct CltArgs {
  std::string nu;
  int n = 100;
  std::size_t traj = 1000;
  int degree_cap = 0;
  std::size_t ref_draws = 100000;
  double ks_tol = 0.02;
  double moment_tol = 0.10;
  std::string gate = "auto";
};

struct MehlerHeineArgs {
  std::string lambda;
  std::string x;
  std::string n_list = "4,8,16,32,64";
  std::size_t samples = 1000000;
  double max_slope = -0.9;
};

struct LaguerreArgs {
  std::size_t draws = 100000;
  std::string transform_lambda;
  std::size_t inner = 10000;
  std::size_t batches = 50;
};

/// Each command writes its artifacts under common.out, prints a one-line JSON
/// summary and returns an exit code. `config` is the effective configuration
/// echoed into the JSON outputs.
int run_eval(const CommonArgs& common, const EvalArgs& args, const nlohmann::json& config);
int run_linearize(const CommonArgs& common, const LinearizeArgs& args, const nlohmann::json& config);
int run_walk(const CommonArgs& common, const WalkArgs& args, const nlohmann::json& config);
int run_clt(const CommonArgs& common, const CltArgs& args, const nlohmann::json& config);
int run_mehler_heine(const CommonArgs& common, const MehlerHeineArgs& args,
                     const nlohmann::json& config);
int run_laguerre(const CommonArgs& common, const LaguerreArgs& args, const nlohmann::json& config);

/// --cache-dir, else $GRASSWALK_CACHE, else ./.cache/coeffs.
std::filesystem::path resolve_cache_dir(const std::string& flag);

}  // namespace grasswalk::cli
