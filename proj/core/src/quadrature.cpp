#include "grasswalk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "grasswalk/error.hpp"
#include "grasswalk/weights.hpp"

namespace grasswalk {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2;
}

MultiplicityTriple multiplicities(int d, double p, int q) {
  return {d * (p - q) / 2.0, (d - 1) / 2.0, d / 2.0};
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -z;
    nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

QuadratureGrid make_grid(int q, int nodes_per_axis, bool graded) {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "grid rank must be >= 1");
  if (nodes_per_axis < 2) {
    throw Error(ErrorCode::InvalidNodeCount,
                "nodes_per_axis must be >= 2, got " + std::to_string(nodes_per_axis));
  }
  QuadratureGrid grid;
  grid.rank_ = q;
  grid.graded_ = graded;
  std::vector<double> t;
  std::vector<double> w;
  gauss_legendre(nodes_per_axis, t, w);
  grid.nodes_.resize(t.size());
  grid.weights_.resize(w.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double u = (t[i] + 1.0) / 2.0;
    if (graded) {
      grid.nodes_[i] = kHalfPi * u * u;
      grid.weights_[i] = w[i] * kHalfPi * u;
    } else {
      grid.nodes_[i] = kHalfPi * u;
      grid.weights_[i] = w[i] * kHalfPi / 2.0;
    }
  }
  return grid;
}

QuadratureGrid make_grid(int q, int nodes_per_axis, const MultiplicityTriple& k) {
  return make_grid(q, nodes_per_axis, !integer_exponents(k));
}

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

TensorRule cube_rule(const QuadratureGrid& grid) {
  const int q = grid.rank();
  const std::size_t n = static_cast<std::size_t>(grid.nodes_per_axis());
  const std::size_t total = ipow(n, q);
  TensorRule rule;
  rule.rank = q;
  rule.coords.resize(total * static_cast<std::size_t>(q));
  rule.weights.resize(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(q), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double w = 1.0;
    for (int a = 0; a < q; ++a) {
      const std::size_t i = idx[static_cast<std::size_t>(a)];
      rule.coords[flat * static_cast<std::size_t>(q) + static_cast<std::size_t>(a)] =
          grid.nodes()[i];
      w *= grid.axis_weights()[i];
    }
    rule.weights[flat] = w;
    for (int a = q - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < n) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  return rule;
}

TensorRule chamber_rule(const QuadratureGrid& grid) {
  const int q = grid.rank();
  const std::size_t n = static_cast<std::size_t>(grid.nodes_per_axis());
  const std::size_t total = ipow(n, q);
  double factorial = 1.0;
  for (int i = 2; i <= q; ++i) factorial *= i;
  TensorRule rule;
  rule.rank = q;
  rule.coords.resize(total * static_cast<std::size_t>(q));
  rule.weights.resize(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(q), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double w = factorial;
    double previous = kHalfPi;
    for (int a = 0; a < q; ++a) {
      const std::size_t i = idx[static_cast<std::size_t>(a)];
      const double scale = previous / kHalfPi;
      const double x = grid.nodes()[i] * scale;
      rule.coords[flat * static_cast<std::size_t>(q) + static_cast<std::size_t>(a)] = x;
      w *= grid.axis_weights()[i] * scale;
      previous = x;
    }
    rule.weights[flat] = w;
    for (int a = q - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < n) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  return rule;
}

double bc_weight_density(std::span<const double> x, const MultiplicityTriple& k) {
  const std::size_t q = x.size();
  double value = 1.0;
  for (std::size_t i = 0; i < q; ++i) {
    if (k.k1 != 0.0) value *= std::pow(std::abs(2.0 * std::sin(x[i])), 2.0 * k.k1);
    if (k.k2 != 0.0) value *= std::pow(std::abs(2.0 * std::sin(2.0 * x[i])), 2.0 * k.k2);
  }
  if (k.k3 != 0.0) {
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = i + 1; j < q; ++j) {
        const double a = std::abs(2.0 * std::sin(x[i] - x[j]));
        const double b = std::abs(2.0 * std::sin(x[i] + x[j]));
        value *= std::pow(a * b, 2.0 * k.k3);
      }
    }
  }
  return value;
}

namespace {

double rule_inner_product(const TensorRule& rule, const CubeFunction& f, const CubeFunction& g,
                          const MultiplicityTriple& k) {
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto x = rule.point(i);
    const double w = rule.weights[i] * bc_weight_density(x, k);
    if (w == 0.0) continue;
    total += f(x) * g(x) * w;
  }
  return total;
}

}  // namespace

double inner_product(const CubeFunction& f, const CubeFunction& g, const QuadratureGrid& grid,
                     const MultiplicityTriple& k) {
  return rule_inner_product(cube_rule(grid), f, g, k);
}

double invariant_inner_product(const CubeFunction& f, const CubeFunction& g,
                               const QuadratureGrid& grid, const MultiplicityTriple& k) {
  return rule_inner_product(chamber_rule(grid), f, g, k);
}

GridDiagnostics validate_grid(const QuadratureGrid& grid, const MultiplicityTriple& k, int degree,
                              double tolerance) {
  if (degree < 0 || degree % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "validate_grid: degree must be even and >= 0");
  }
  const int q = grid.rank();
  const Weight top = make_weight(std::vector<int>(static_cast<std::size_t>(q), degree));
  const CubeFunction one = [](std::span<const double>) { return 1.0; };
  const CubeFunction orbit = [&top](std::span<const double> x) { return orbit_sum_eval(top, x); };

  const QuadratureGrid fine = make_grid(q, 2 * grid.nodes_per_axis(), grid.graded());
  auto relative = [](double coarse, double refined) {
    const double scale = std::max(std::abs(refined), 1e-300);
    return std::abs(coarse - refined) / scale;
  };

  GridDiagnostics diag;
  diag.nodes_per_axis = grid.nodes_per_axis();
  diag.refined_nodes_per_axis = fine.nodes_per_axis();
  diag.degree = degree;
  diag.tolerance = tolerance;
  diag.constant_change = relative(invariant_inner_product(one, one, grid, k),
                                  invariant_inner_product(one, one, fine, k));
  diag.orbit_change = relative(invariant_inner_product(orbit, orbit, grid, k),
                               invariant_inner_product(orbit, orbit, fine, k));
  diag.resolved = diag.constant_change < tolerance && diag.orbit_change < tolerance;
  return diag;
}

bool integer_exponents(const MultiplicityTriple& k) noexcept {
  auto is_int = [](double v) { return std::abs(v - std::round(v)) < 1e-12; };
  return is_int(2.0 * k.k1) && is_int(2.0 * k.k2) && is_int(2.0 * k.k3);
}

int default_nodes_per_axis(const MultiplicityTriple& k, int degree) {
  if (integer_exponents(k)) return std::max(64, 2 * degree + 32);
  return std::max(128, 4 * degree + 64);
}

}  // namespace grasswalk
