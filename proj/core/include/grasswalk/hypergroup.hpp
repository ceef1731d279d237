#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "grasswalk/params.hpp"
#include "grasswalk/polynomials.hpp"
#include "grasswalk/quadrature.hpp"
#include "grasswalk/weights.hpp"

namespace grasswalk {

/// Finitely supported signed measure on dominant weights, iterated in BasisOrder.
class WeightMeasure {
 public:
  using Map = std::map<Weight, double, BasisOrder>;

  WeightMeasure() = default;
  static WeightMeasure dirac(const Weight& w);

  /// Adds mass at w (entries with total mass exactly 0 are kept).
  void add(const Weight& w, double mass);
  double mass(const Weight& w) const;
  double total() const;
  bool empty() const noexcept { return masses_.empty(); }
  std::size_t size() const noexcept { return masses_.size(); }
  int rank() const noexcept { return masses_.empty() ? 0 : masses_.begin()->first.rank(); }
  int max_first() const noexcept;
  const Map& masses() const noexcept { return masses_; }
  Map::const_iterator begin() const noexcept { return masses_.begin(); }
  Map::const_iterator end() const noexcept { return masses_.end(); }

  bool operator==(const WeightMeasure&) const = default;

 private:
  Map masses_;
};

/// "2,0:0.5;4,2:0.5" (items separated by ';', weight and mass by ':').
/// Throws ParseError, RankMismatch and the make_weight errors.
WeightMeasure parse_measure(std::string_view text, int rank);
std::string to_string(const WeightMeasure& nu);
/// Throws InvalidArgument unless masses >= -1e-10 and they sum to 1 within 1e-10.
void require_probability(const WeightMeasure& nu);

/// One linearization row delta_lambda * delta_mu = sum_tau c_tau delta_tau.
struct LinearizationRow {
  std::vector<std::size_t> support;  // basis indices, ascending
  std::vector<double> coeffs;        // noise-clamped and renormalized
  std::vector<double> cumulative;    // for sampling; empty when flagged
  double raw_sum = 0.0;              // sum before clamping and renormalizing
  double most_negative = 0.0;        // smallest raw coefficient (<= 0)
  std::size_t most_negative_tau = 0;
  double outside_support = 0.0;      // largest |c| at tau not below lambda + mu
  bool flagged = false;              // some coefficient <= -1e-8
};

/// Linearization coefficients, Haar weights and moments for one parameter set
/// and degree cap. Rows are computed on demand by projecting R_lambda R_mu
/// onto every R_tau with tau <= lambda + mu and are cached; a row for
/// (lambda, mu) needs lambda_1 + mu_1 <= degree_cap.
///
/// Coefficients in (-1e-8, 0) and magnitudes below 1e-13 are treated as
/// quadrature noise and zeroed; anything <= -1e-8 is kept and the row flagged.
///
/// row() may be called from several threads at once.
class Hypergroup {
 public:
  /// nodes_per_axis = 0 picks default_nodes_per_axis(k, degree_cap).
  /// Throws GridUnderResolved if validate_grid fails at degree_cap.
  Hypergroup(const ModelParams& params, int degree_cap, int nodes_per_axis = 0);

  /// Process-wide instances keyed by (d, p, q, degree_cap, nodes_per_axis).
  static std::shared_ptr<Hypergroup> shared(const ModelParams& params, int degree_cap,
                                            int nodes_per_axis = 0);

  const ModelParams& params() const noexcept { return basis_->params(); }
  int degree_cap() const noexcept { return basis_->degree_cap(); }
  int nodes_per_axis() const noexcept { return basis_->nodes_per_axis(); }
  const JacobiBasis& basis() const noexcept { return *basis_; }

  /// Throws DegreeCapExceeded when w_1 > degree_cap, RankMismatch on rank.
  std::size_t index(const Weight& w) const;
  const Weight& weight(std::size_t i) const { return basis_->weights()[i]; }

  /// Throws DegreeCapExceeded when lambda_1 + mu_1 > degree_cap.
  const LinearizationRow& row(std::size_t a, std::size_t b) const;
  const LinearizationRow& row(const Weight& lambda, const Weight& mu) const;
  WeightMeasure product(const Weight& lambda, const Weight& mu) const;

  double haar_weight(const Weight& lambda) const;
  double moment(std::size_t i) const { return basis_->moment(i); }
  double moment(const Weight& lambda) const { return basis_->moment(index(lambda)); }

  WeightMeasure convolve(const WeightMeasure& a, const WeightMeasure& b) const;
  double modified_variance(const WeightMeasure& nu) const;
  double fourier(const WeightMeasure& nu, std::span<const double> x) const;

  std::size_t cached_rows() const;
  /// "d=1,p=3,q=2,cap=12,nodes=64"
  std::string signature() const;
  /// JSON sidecar; load() ignores files written for another signature and
  /// returns the number of rows taken over. Throws IoError / ParseError.
  std::size_t load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
  /// File name used inside a cache directory.
  std::string cache_file_name() const;

 private:
  std::unique_ptr<LinearizationRow> compute_row(std::size_t a, std::size_t b) const;

  std::shared_ptr<const JacobiBasis> basis_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<LinearizationRow>> rows_;
};

/// Free-function forms over a caller-supplied grid; each validates the grid
/// for the degree it needs (GridUnderResolved).
WeightMeasure linearize(const Weight& lambda, const Weight& mu, const ModelParams& params,
                        const QuadratureGrid& grid);
WeightMeasure convolve(const WeightMeasure& a, const WeightMeasure& b, const ModelParams& params,
                       const QuadratureGrid& grid);
double haar_weight(const Weight& lambda, const ModelParams& params, const QuadratureGrid& grid);
double modified_variance(const WeightMeasure& nu, const ModelParams& params,
                         const QuadratureGrid& grid);
double fourier_transform(const WeightMeasure& nu, const ChamberPoint& x, const ModelParams& params,
                         const QuadratureGrid& grid);

struct AdmissibilityReport {
  bool admissible_up_to_cap = true;
  double most_negative = 0.0;
  std::optional<Weight> lambda;
  std::optional<Weight> mu;
  std::optional<Weight> tau;
  int degree_cap = 0;
  std::size_t rows_scanned = 0;
};

/// Scans every row (lambda, mu) with lambda in supp(nu) and mu_1 <= degree_cap.
AdmissibilityReport check_admissible(const WeightMeasure& nu, const ModelParams& params,
                                     const QuadratureGrid& grid, int degree_cap);

}  // namespace grasswalk
