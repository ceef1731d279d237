#pragma once

// Reference computations that share no code with the library: hypergeometric
// series, Gauss-Jacobi rules from the Golub-Welsch eigenproblem, brute-force
// orbit enumeration and plain numerical differentiation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

namespace oracle {

/// 2F1(-n, n + a + b + 1; a + 1; (1 - u)/2), the classical Jacobi polynomial
/// normalized to 1 at u = 1.
inline double jacobi_hypergeometric(int n, double a, double b, double u) {
  // Extended precision: the terms alternate and grow with n and a.
  const long double z = (1.0L - u) / 2.0L;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 0; k < n; ++k) {
    term *= (-n + k) * (n + a + b + 1.0L + k) / ((a + 1.0L + k) * (k + 1.0L)) * z;
    sum += term;
  }
  return static_cast<double>(sum);
}

/// Gauss-Jacobi nodes and weights for (1-u)^a (1+u)^b on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Rule gauss_jacobi(int n, double a, double b) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double k = i;
    const double s = 2.0 * k + a + b;
    J(i, i) = (s == 0.0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (i + 1 < n) {
      const double k1 = k + 1.0;
      const double s1 = 2.0 * k1 + a + b;
      const double off =
          std::sqrt(4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0)));
      J(i, i + 1) = J(i + 1, i) = off;
    }
  }
  if (n > 1 && a + b == -1.0) {
    // The generic off-diagonal formula divides by s1 - 1 = 0 for k = 0.
    const double off = std::sqrt(4.0 * (1 + a) * (1 + b) / ((2 + a + b) * (2 + a + b) * (3 + a + b)));
    J(0, 1) = J(1, 0) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
                     std::tgamma(a + b + 2.0);
  Rule r;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    r.weights.push_back(mu0 * v * v);
  }
  return r;
}

/// All 2^q q! signed permutations applied to v, with duplicates.
inline std::vector<std::vector<int>> signed_permutation_images(std::vector<int> v) {
  std::vector<std::vector<int>> out;
  const std::size_t q = v.size();
  std::vector<std::size_t> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (unsigned mask = 0; mask < (1u << q); ++mask) {
      std::vector<int> img(q);
      for (std::size_t i = 0; i < q; ++i) img[i] = ((mask >> i) & 1u) ? -v[perm[i]] : v[perm[i]];
      out.push_back(img);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Brute-force normalized orbit sum: average of e^{i<mu,x>} over the orbit.
inline double orbit_sum(const std::vector<int>& lambda, const std::vector<double>& x) {
  const auto images = signed_permutation_images(lambda);
  std::set<std::vector<int>> orbit(images.begin(), images.end());
  double s = 0.0;
  for (const auto& mu : orbit) {
    double phase = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) phase += mu[i] * x[i];
    s += std::cos(phase);
  }
  return s / static_cast<double>(orbit.size());
}

/// Five-point second derivative along coordinate i at x.
inline double second_derivative(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  auto at = [&](double t) {
    x[i] = x0 + t;
    return f(x);
  };
  return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
}

inline double first_derivative(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  auto at = [&](double t) {
    x[i] = x0 + t;
    return f(x);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

inline double half_normal_cdf(double t) { return t <= 0 ? 0.0 : std::erf(t / std::sqrt(2.0)); }

}  // namespace oracle
