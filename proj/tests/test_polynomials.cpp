#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "grasswalk/error.hpp"
#include "grasswalk/polynomials.hpp"
#include "grasswalk/quadrature.hpp"
#include "oracles.hpp"

using namespace grasswalk;
using std::numbers::pi;

namespace {

QuadratureGrid grid_for(const ModelParams& params, int degree) {
  return make_grid(params.q(), default_nodes_per_axis(params.k(), degree), params.k());
}

JacobiExpansion expand(const Weight& lambda, const ModelParams& params) {
  return jacobi_expand(lambda, params, grid_for(params, lambda.first()));
}

double classical(const Weight& lambda, const ModelParams& params, double x) {
  return oracle::jacobi_hypergeometric(lambda[0] / 2, params.alpha(), params.beta(), std::cos(2 * x));
}

}  // namespace

TEST_CASE("expansion examples") {
  const auto p11 = ModelParams::make(1, 1, 1);
  const auto e0 = expand(Weight::zero(1), p11);
  REQUIRE(e0.coeffs.size() == 1);
  CHECK(e0.coeffs[0].c == 1.0);
  CHECK(jacobi_eval(e0, std::vector<double>{0.9}) == 1.0);

  const auto e2 = expand(make_weight({2}), p11);
  CHECK(std::abs(e2.coefficient(make_weight({2})) - 1.0) < 1e-12);
  CHECK(std::abs(e2.coefficient(make_weight({0}))) < 1e-12);
  CHECK(std::abs(jacobi_eval(e2, std::vector<double>{pi / 4})) < 1e-12);

  // R_1^{(1/2,-1/2)}(u) = 1 - (a+b+2)(1-u)/(2(a+1)) = 1/3 + (2/3) u.
  const auto p13 = ModelParams::make(1, 3, 1);
  const auto e = expand(make_weight({2}), p13);
  const double a = p13.alpha(), b = p13.beta();
  const double slope = (a + b + 2) / (2 * (a + 1));
  CHECK(e.coefficient(make_weight({0})) == doctest::Approx(1 - slope).epsilon(1e-12));
  CHECK(e.coefficient(make_weight({2})) == doctest::Approx(slope).epsilon(1e-12));
}

TEST_CASE("rank-one expansion against the hypergeometric series") {
  for (int d : {1, 2, 4}) {
    for (double p : {1.0, 2.0, 3.5}) {
      const auto params = ModelParams::make(d, p, 1);
      for (int l : {0, 2, 8, 20}) {
        const Weight lambda = make_weight({l});
        const auto e = expand(lambda, params);
        for (double x : {0.0, 0.2, 0.7, 1.1, 1.5}) {
          const double want = classical(lambda, params, x);
          CHECK(std::abs(jacobi_eval(e, std::vector<double>{x}) - want) < 1e-10);
          CHECK(std::abs(jacobi_eval_rank_one(lambda, params, x) - want) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("rank-one recurrence examples") {
  const auto p11 = ModelParams::make(1, 1, 1);
  const auto p21 = ModelParams::make(2, 1, 1);
  for (double t : {0.0, 0.3, 1.2}) {
    CHECK(jacobi_eval_rank_one(Weight::zero(1), p11, t) == 1.0);
    CHECK(jacobi_eval_rank_one(make_weight({6}), p11, t) == doctest::Approx(std::cos(6 * t)).epsilon(1e-13));
    CHECK(jacobi_eval_rank_one(make_weight({2}), p21, t) == doctest::Approx(std::cos(2 * t)).epsilon(1e-13));
  }
  try {
    jacobi_eval_rank_one(make_weight({2, 0}), ModelParams::make(1, 3, 2), 0.1);
    FAIL("expected RankNotOne");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankNotOne);
  }
}

TEST_CASE("moment closed forms") {
  CHECK(moment_m_rank_one(Weight::zero(1), ModelParams::make(1, 1, 1)) == 0.0);
  CHECK(moment_m_rank_one(make_weight({2}), ModelParams::make(1, 1, 1)) == doctest::Approx(4.0));
  CHECK(moment_m_rank_one(make_weight({2}), ModelParams::make(1, 2, 1)) == doctest::Approx(3.0));
  CHECK(moment_m_rank_one(make_weight({4}), ModelParams::make(2, 3, 1)) == doctest::Approx(20.0 / 3.0));
  CHECK(moment_m(expand(Weight::zero(2), ModelParams::make(1, 3, 2))) == 0.0);
  for (int d : {1, 2, 4}) {
    for (double p : {1.0, 2.0, 3.5}) {
      const auto params = ModelParams::make(d, p, 1);
      for (int l : {2, 6, 12}) {
        const Weight lambda = make_weight({l});
        CHECK(moment_m(expand(lambda, params)) ==
              doctest::Approx(moment_m_rank_one(lambda, params)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("rank-two properties") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.0, pi / 2);
  for (int d : {1, 2, 4}) {
    for (double p : {2.0, 3.0, 4.5}) {
      const auto params = ModelParams::make(d, p, 2);
      const auto basis = JacobiBasis::shared(params, 20, default_nodes_per_axis(params.k(), 20));
      CHECK(basis->triangularity_residual() < 1e-8);
      for (std::size_t j = 0; j < basis->size(); ++j) {
        const auto e = basis->expansion(j);
        const Weight& lambda = e.lambda;
        CAPTURE(to_string(lambda));
        CHECK(e.min_coefficient() >= -1e-8);
        CHECK(std::abs(e.coefficient_sum() - 1.0) < 1e-8);
        CHECK(std::abs(jacobi_eval(e, std::vector<double>{0.0, 0.0}) - 1.0) < 1e-13);
        const double m = moment_m(e);
        CHECK(m <= lambda.first() * lambda.first() * (1 + 1e-10) + 1e-10);
        if (!lambda.is_zero()) CHECK(m > 0.0);
        const double x1 = unif(gen), x2 = unif(gen);
        CHECK(std::abs(jacobi_eval(e, std::vector<double>{x1, x2}) -
                       jacobi_eval(e, std::vector<double>{x2, x1})) < 1e-14);
        for (const auto& term : e.coeffs) CHECK(dominance_leq(term.mu, lambda));
      }
    }
  }
}

TEST_CASE("boundedness on an alcove grid") {
  for (int d : {1, 2}) {
    const auto params = ModelParams::make(d, 3, 2);
    const auto basis = JacobiBasis::shared(params, 12, default_nodes_per_axis(params.k(), 12));
    for (std::size_t j = 0; j < basis->size(); ++j) {
      double worst = 0.0;
      for (int a = 0; a < 10; ++a) {
        for (int b = 0; b <= a; ++b) {
          const std::vector<double> x{a * pi / 18, b * pi / 18};
          worst = std::max(worst, std::abs(basis->evaluate(j, x)));
        }
      }
      CHECK(worst <= 1 + 1e-8);
    }
  }
}

TEST_CASE("orthogonality on an independent finer grid") {
  const auto params = ModelParams::make(1, 3, 2);
  const auto basis = JacobiBasis::shared(params, 8, 0 + default_nodes_per_axis(params.k(), 8));
  const auto fine = make_grid(2, 3 * basis->nodes_per_axis() / 2 + 7);
  const std::size_t n = basis->size();
  std::vector<CubeFunction> fs;
  for (std::size_t j = 0; j < n; ++j) {
    fs.push_back([basis, j](std::span<const double> x) { return basis->evaluate(j, x); });
  }
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(invariant_inner_product(fs[j], fs[j], fine, params.k()));
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      worst = std::max(worst, std::abs(invariant_inner_product(fs[i], fs[j], fine, params.k())) /
                                  (norms[i] * norms[j]));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("basis size does not change the polynomials") {
  const auto params = ModelParams::make(2, 2, 2);
  const auto big = JacobiBasis::shared(params, 12, default_nodes_per_axis(params.k(), 12));
  for (const auto& lambda : enumerate_weights(2, 6)) {
    const auto small = expand(lambda, params);
    const auto wide = big->expansion(*big->index_of(lambda));
    for (const auto& term : wide.coeffs) CHECK(std::abs(term.c - small.coefficient(term.mu)) < 1e-10);
  }
}

TEST_CASE("derivatives at the origin") {
  for (auto [d, p] : {std::pair{1, 3.0}, {2, 2.0}, {4, 4.5}}) {
    const auto params = ModelParams::make(d, p, 2);
    for (const auto& lambda : enumerate_weights(2, 6)) {
      const auto e = expand(lambda, params);
      auto f = [&](const std::vector<double>& x) { return jacobi_eval(e, x); };
      const double m = moment_m(e);
      for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(oracle::first_derivative(f, {0.0, 0.0}, i, 1e-3)) < 1e-9);
        CHECK(std::abs(oracle::second_derivative(f, {0.0, 0.0}, i, 1e-3) + m) < 1e-6 * (1 + m));
      }
    }
  }
}

TEST_CASE("errors and serialization") {
  const auto params = ModelParams::make(1, 3, 2);
  try {
    jacobi_expand(make_weight({12, 0}), params, make_grid(2, 4));
    FAIL("expected GridUnderResolved");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridUnderResolved);
  }
  CHECK_THROWS_AS(jacobi_expand(make_weight({2}), params, make_grid(2, 64)), Error);
  const auto e = expand(make_weight({4, 2}), params);
  const auto back = expansion_from_json(to_json(e));
  CHECK(back.lambda == e.lambda);
  CHECK(back.params == e.params);
  REQUIRE(back.coeffs.size() == e.coeffs.size());
  for (std::size_t i = 0; i < e.coeffs.size(); ++i) {
    CHECK(back.coeffs[i].mu == e.coeffs[i].mu);
    CHECK(back.coeffs[i].c == e.coeffs[i].c);
  }
  CHECK_THROWS_AS(expansion_from_json("{nope"), Error);
}
