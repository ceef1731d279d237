#include "grasswalk/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include "json.hpp"
#include <shared_mutex>
#include <tuple>

#include "grasswalk/error.hpp"

namespace grasswalk {

double JacobiExpansion::coefficient(const Weight& mu) const {
  for (const auto& term : coeffs) {
    if (term.mu == mu) return term.c;
  }
  return 0.0;
}

double JacobiExpansion::coefficient_sum() const {
  double s = 0.0;
  for (const auto& term : coeffs) s += term.c;
  return s;
}

double JacobiExpansion::min_coefficient() const {
  double m = coeffs.empty() ? 0.0 : coeffs.front().c;
  for (const auto& term : coeffs) m = std::min(m, term.c);
  return m;
}

namespace {

// Distinct permutations of a weight's entries, halved (the cos table is indexed
// by entry / 2).
std::vector<std::vector<int>> half_permutations(const Weight& w) {
  std::vector<int> parts(w.parts().begin(), w.parts().end());
  for (int& v : parts) v /= 2;
  std::sort(parts.begin(), parts.end());
  std::vector<std::vector<int>> out;
  do {
    out.push_back(parts);
  } while (std::next_permutation(parts.begin(), parts.end()));
  return out;
}

}  // namespace

JacobiBasis::JacobiBasis(const ModelParams& params, int degree_cap, const QuadratureGrid& grid)
    : params_(params), degree_cap_(degree_cap), nodes_per_axis_(grid.nodes_per_axis()) {
  const int q = params.q();
  if (grid.rank() != q) {
    throw Error(ErrorCode::RankMismatch, "grid rank differs from q");
  }
  weights_ = enumerate_weights(q, degree_cap);
  const auto n = static_cast<Eigen::Index>(weights_.size());
  for (std::size_t j = 0; j < weights_.size(); ++j) index_.emplace(to_string(weights_[j]), j);

  const TensorRule rule = chamber_rule(grid);
  const MultiplicityTriple k = params.k();
  std::vector<std::size_t> kept;
  std::vector<double> w;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double wi = rule.weights[i] * bc_weight_density(rule.point(i), k);
    if (wi > 0.0) {
      kept.push_back(i);
      w.push_back(wi);
    }
  }
  const auto nodes = static_cast<Eigen::Index>(kept.size());
  node_weights_ = Eigen::Map<const Eigen::VectorXd>(w.data(), nodes);
  unit_norm2_ = node_weights_.sum();

  // cos(2 m x_a) for m = 0 .. cap/2, per node and axis.
  const int half_cap = degree_cap / 2;
  const auto stride = static_cast<std::size_t>(half_cap + 1);
  std::vector<double> cos_table(kept.size() * static_cast<std::size_t>(q) * stride);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto x = rule.point(kept[r]);
    for (int a = 0; a < q; ++a) {
      double* row = &cos_table[(r * static_cast<std::size_t>(q) + static_cast<std::size_t>(a)) * stride];
      for (int m = 0; m <= half_cap; ++m) row[m] = std::cos(2.0 * m * x[static_cast<std::size_t>(a)]);
    }
  }

  Eigen::MatrixXd orbit(nodes, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto perms = half_permutations(weights_[static_cast<std::size_t>(j)]);
    const double inv = 1.0 / static_cast<double>(perms.size());
    for (Eigen::Index r = 0; r < nodes; ++r) {
      const double* base = &cos_table[static_cast<std::size_t>(r) * static_cast<std::size_t>(q) * stride];
      double total = 0.0;
      for (const auto& perm : perms) {
        double prod = 1.0;
        for (int a = 0; a < q; ++a) {
          prod *= base[static_cast<std::size_t>(a) * stride + static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
        }
        total += prod;
      }
      orbit(r, j) = total * inv;
    }
  }

  // Blocked QR of diag(sqrt(w)) * m: stack the running triangle on top of
  // each row block and refactor. Returns the triangular factor.
  const Eigen::VectorXd sqrt_w = node_weights_.cwiseSqrt();
  const auto triangle = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(n, n);
    const Eigen::Index block = std::max<Eigen::Index>(2048, 4 * n);
    Eigen::MatrixXd stacked;
    for (Eigen::Index start = 0; start < nodes; start += block) {
      const Eigen::Index rows = std::min(block, nodes - start);
      stacked.resize(n + rows, n);
      stacked.topRows(n) = tri;
      stacked.bottomRows(rows) = sqrt_w.segment(start, rows).asDiagonal() * m.middleRows(start, rows);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
      tri = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    }
    return tri;
  };
  const Eigen::MatrixXd tri = triangle(orbit);

  const Eigen::VectorXd col_norms = (sqrt_w.asDiagonal() * orbit).colwise().norm();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(std::abs(tri(j, j)) > 1e-13 * col_norms(j))) {
      throw Error(ErrorCode::NumericBreakdown,
                  "orthogonalization lost rank at weight " + to_string(weights_[static_cast<std::size_t>(j)]));
    }
  }

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  coeffs_ = tri.triangularView<Eigen::Upper>().solve(identity);
  // Inverting an ill-conditioned triangle loses orthogonality at large
  // multiplicities; a second pass over the computed values restores it.
  const Eigen::MatrixXd again = triangle(orbit * coeffs_);
  coeffs_ = again.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(coeffs_);
  // Drop the numerically zero entries first so that the normalized
  // coefficients sum to 1 up to rounding.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double full = coeffs_.col(j).head(j + 1).sum();
    for (Eigen::Index i = 0; i < j; ++i) {
      if (!dominance_leq(weights_[static_cast<std::size_t>(i)], weights_[static_cast<std::size_t>(j)])) {
        triangularity_residual_ = std::max(triangularity_residual_, std::abs(coeffs_(i, j) / full));
        coeffs_(i, j) = 0.0;
      }
    }
    const double s = coeffs_.col(j).head(j + 1).sum();
    if (!(std::abs(s) > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::NumericBreakdown, "polynomial vanishes at the origin");
    }
    coeffs_.col(j) /= s;
  }

  node_values_.noalias() = orbit * coeffs_.triangularView<Eigen::Upper>();
  norm2_.resize(weights_.size());
  moments_.resize(weights_.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    norm2_[static_cast<std::size_t>(j)] = node_weights_.dot(node_values_.col(j).cwiseAbs2());
    double m = 0.0;
    for (Eigen::Index i = 0; i <= j; ++i) {
      const auto parts = weights_[static_cast<std::size_t>(i)].parts();
      double sq = 0.0;
      for (int v : parts) sq += static_cast<double>(v) * v;
      m += coeffs_(i, j) * sq / q;
    }
    moments_[static_cast<std::size_t>(j)] = m;
  }
}

std::optional<std::size_t> JacobiBasis::index_of(const Weight& w) const {
  const auto it = index_.find(to_string(w));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

JacobiExpansion JacobiBasis::expansion(std::size_t j) const {
  JacobiExpansion out{weights_.at(j), params_, {}, nodes_per_axis_, tolerance()};
  for (std::size_t i = 0; i <= j; ++i) {
    const double c = coeffs_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (c != 0.0 || i == j) out.coeffs.push_back({weights_[i], c});
  }
  return out;
}

double JacobiBasis::evaluate(std::size_t j, std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t i = 0; i <= j; ++i) {
    const double c = coeffs_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (c != 0.0) total += c * orbit_sum_eval(weights_[i], x);
  }
  return total;
}

std::shared_ptr<const JacobiBasis> JacobiBasis::shared(const ModelParams& params, int degree_cap,
                                                       int nodes_per_axis) {
  using Key = std::tuple<int, double, int, int, int>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const JacobiBasis>> cache;
  const Key key{params.d(), params.p(), params.q(), degree_cap, nodes_per_axis};
  {
    std::shared_lock lock(mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const JacobiBasis>(params, degree_cap,
                                                   make_grid(params.q(), nodes_per_axis, params.k()));
  std::unique_lock lock(mutex);
  return cache.emplace(key, std::move(built)).first->second;
}

JacobiExpansion jacobi_expand(const Weight& lambda, const ModelParams& params,
                              const QuadratureGrid& grid) {
  if (lambda.rank() != params.q() || grid.rank() != params.q()) {
    throw Error(ErrorCode::RankMismatch, "weight, params and grid must share q");
  }
  const auto diag = validate_grid(grid, params.k(), lambda.first());
  if (!diag.resolved) {
    throw Error(ErrorCode::GridUnderResolved,
                "grid with " + std::to_string(grid.nodes_per_axis()) +
                    " nodes per axis is under-resolved for degree " + std::to_string(lambda.first()));
  }
  const auto basis = JacobiBasis::shared(params, lambda.first(), grid.nodes_per_axis());
  return basis->expansion(*basis->index_of(lambda));
}

double jacobi_eval(const JacobiExpansion& expansion, std::span<const double> x) {
  if (static_cast<int>(x.size()) != expansion.lambda.rank()) {
    throw Error(ErrorCode::RankMismatch, "point rank differs from weight rank");
  }
  double total = 0.0;
  for (const auto& term : expansion.coeffs) total += term.c * orbit_sum_eval(term.mu, x);
  return total;
}

double jacobi_eval_rank_one(const Weight& lambda, const ModelParams& params, double x) {
  if (params.q() != 1 || lambda.rank() != 1) {
    throw Error(ErrorCode::RankNotOne, "rank-one formula needs q = 1");
  }
  const int n = lambda.first() / 2;
  const double a = params.alpha();
  const double b = params.beta();
  const double u = std::cos(2.0 * x);
  if (n == 0) return 1.0;

  // Unnormalized P_m via the standard recurrence, then divide by P_m(1).
  double p_prev = 1.0;
  double p_cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * u;
  double one_prev = 1.0;
  double one_cur = a + 1.0;
  for (int m = 1; m < n; ++m) {
    const double s = 2.0 * m + a + b;
    const double c1 = 2.0 * (m + 1) * (m + a + b + 1) * s;
    const double c2 = (s + 1) * (a * a - b * b);
    const double c3 = s * (s + 1) * (s + 2);
    const double c4 = 2.0 * (m + a) * (m + b) * (s + 2);
    const double next = ((c2 + c3 * u) * p_cur - c4 * p_prev) / c1;
    const double next_one = ((c2 + c3) * one_cur - c4 * one_prev) / c1;
    p_prev = p_cur;
    p_cur = next;
    one_prev = one_cur;
    one_cur = next_one;
    // Keep magnitudes bounded; only the ratio matters.
    if (std::abs(one_cur) > 1e100) {
      p_prev /= one_cur;
      p_cur /= one_cur;
      one_prev /= one_cur;
      one_cur = 1.0;
    }
  }
  return p_cur / one_cur;
}

double moment_m(const JacobiExpansion& expansion) {
  const int q = expansion.lambda.rank();
  double m = 0.0;
  for (const auto& term : expansion.coeffs) {
    double sq = 0.0;
    for (int v : term.mu.parts()) sq += static_cast<double>(v) * v;
    m += term.c * sq / q;
  }
  return m;
}

double moment_m_rank_one(const Weight& lambda, const ModelParams& params) {
  if (params.q() != 1 || lambda.rank() != 1) {
    throw Error(ErrorCode::RankNotOne, "rank-one formula needs q = 1");
  }
  const double l = lambda.first();
  const double dp = params.d() * params.p();
  return l * (l + dp + params.d() - 2.0) / dp;
}

std::string to_json(const JacobiExpansion& expansion) {
  nlohmann::json j;
  j["lambda"] = to_string(expansion.lambda);
  j["params"] = {{"d", expansion.params.d()}, {"p", expansion.params.p()}, {"q", expansion.params.q()}};
  auto& coeffs = j["coeffs"] = nlohmann::json::array();
  for (const auto& term : expansion.coeffs) coeffs.push_back({{"mu", to_string(term.mu)}, {"c", term.c}});
  j["grid_nodes"] = expansion.grid_nodes;
  j["tolerance"] = expansion.tolerance;
  return j.dump();
}

JacobiExpansion expansion_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& p = j.at("params");
    const auto params = ModelParams::make(p.at("d").get<int>(), p.at("p").get<double>(), p.at("q").get<int>());
    JacobiExpansion out{parse_weight(j.at("lambda").get<std::string>(), params.q()), params, {},
                        j.at("grid_nodes").get<int>(), j.at("tolerance").get<double>()};
    for (const auto& term : j.at("coeffs")) {
      out.coeffs.push_back({parse_weight(term.at("mu").get<std::string>(), params.q()),
                            term.at("c").get<double>()});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("expansion json: ") + e.what());
  }
}

}  // namespace grasswalk
