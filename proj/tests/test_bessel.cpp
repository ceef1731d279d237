#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "grasswalk/bessel.hpp"
#include "grasswalk/error.hpp"
#include "grasswalk/stats.hpp"
#include "oracles.hpp"

using namespace grasswalk;
using std::numbers::pi;

namespace {

double j0_series(double z) {
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 80; ++m) {
    term *= -(z * z / 4) / (double(m) * m);
    sum += term;
  }
  return sum;
}

// Integral of f over the chamber x1 >= x2 >= 0 truncated at r, via x2 = t x1.
double chamber_integral(const std::function<double(double, double)>& f, double r, int n) {
  const auto rule = oracle::gauss_jacobi(n, 0, 0);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x1 = r * (rule.nodes[i] + 1) / 2;
    for (int j = 0; j < n; ++j) {
      const double t = (rule.nodes[j] + 1) / 2;
      s += rule.weights[i] * rule.weights[j] * f(x1, t * x1) * x1;
    }
  }
  return s * r / 4;
}

}  // namespace

TEST_CASE("rank-one Bessel function") {
  const auto p13 = ModelParams::make(1, 3, 1);
  const auto p21 = ModelParams::make(2, 1, 1);
  CHECK(bessel_eval_rank_one(0.0, 1.0, p13) == 1.0);
  CHECK(bessel_eval_rank_one(1.5, 0.0, p13) == 1.0);
  for (double z : {0.1, 1.0, 5.0, 11.9, 12.1, 20.0, 35.0}) {
    // The alternating series cancels badly beyond z ~ 20.
    if (z <= 20.0) CHECK(std::abs(bessel_eval_rank_one(z, 1.0, p21) - j0_series(z)) < 1e-9);
    for (auto [d, p] : {std::pair{1, 3.0}, {2, 2.5}, {4, 1.0}, {1, 1.0}}) {
      const auto params = ModelParams::make(d, p, 1);
      const double a = d * p / 2 - 1;
      if (a < 0) continue;
      const double want = std::tgamma(a + 1) * std::pow(2 / z, a) * std::cyl_bessel_j(a, z);
      CHECK(std::abs(bessel_eval_rank_one(z, 1.0, params) - want) < 1e-10);
    }
  }
  // alpha = -1/2: j(z) = cos z.
  const auto p11 = ModelParams::make(1, 1, 1);
  for (double z : {0.5, 3.0, 13.0, 40.0}) {
    CHECK(std::abs(bessel_eval_rank_one(z, 1.0, p11) - std::cos(z)) < 1e-10);
  }
  try {
    bessel_eval_rank_one(60.0, 1.0, p13);
    FAIL("expected SeriesRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SeriesRange);
  }
  CHECK_THROWS_AS(bessel_eval_rank_one(1.0, 1.0, ModelParams::make(1, 3, 2)), Error);
}

TEST_CASE("Monte Carlo Bessel function") {
  Rng rng = make_stream(4, 0);
  const auto p13 = ModelParams::make(1, 3, 1);
  const std::vector<double> zero{0.0}, one{1.3};
  const auto at0 = bessel_eval_mc(zero, make_chamber_point({1.0}), p13, 100, rng);
  CHECK(at0.estimate == 1.0);
  CHECK(at0.std_error == 0.0);
  CHECK(bessel_eval_mc(one, make_chamber_point({0.0}), p13, 100, rng).estimate == 1.0);
  for (double x : {0.5, 1.7, 3.0}) {
    const auto est = bessel_eval_mc(one, make_chamber_point({x}), p13, 100000, rng);
    CHECK(std::abs(est.estimate - bessel_eval_rank_one(1.3, x, p13)) < 3 * est.std_error);
  }
  const auto p21 = ModelParams::make(2, 1, 1);
  const auto est = bessel_eval_mc(one, make_chamber_point({2.0}), p21, 100000, rng);
  CHECK(std::abs(est.estimate - j0_series(2.6)) < 3 * est.std_error);
  CHECK_THROWS_AS(bessel_eval_mc(one, make_chamber_point({1.0}), ModelParams::make(4, 2, 1), 10, rng), Error);
}

TEST_CASE("Bessel pool identities") {
  Rng rng = make_stream(8, 0);
  const auto params = ModelParams::make(1, 3, 2);
  const BesselPool pool(params, 50000, rng);
  const std::vector<double> lambda{1.25, 0.5}, x{0.75, 0.5};
  const std::vector<double> lambda2{2.5, 1.0}, x2{1.5, 1.0};
  CHECK(pool.evaluate(lambda2, x).estimate == pool.evaluate(lambda, x2).estimate);
  CHECK(pool.evaluate(std::vector<double>{0, 0}, x).estimate == 1.0);

  const std::vector<double> lambda_swapped{0.5, 1.25}, x_swapped{0.5, 0.75};
  const auto base = pool.evaluate(lambda, x);
  for (const auto& [l, y] : {std::pair{lambda_swapped, x}, {lambda, x_swapped}, {lambda_swapped, x_swapped}}) {
    const auto other = pool.evaluate(l, y);
    CHECK(std::abs(other.estimate - base.estimate) < 3 * (other.std_error + base.std_error));
  }
}

TEST_CASE("Laguerre density") {
  const LaguerreEnsemble half_normal(ModelParams::make(1, 1, 1));
  for (double x : {0.0, 0.4, 1.7, 3.2}) {
    CHECK(laguerre_density(make_chamber_point({x}), half_normal) ==
          doctest::Approx(std::exp(-x * x / 2) / std::sqrt(pi / 2)).epsilon(1e-8));
    CHECK(half_normal.first_marginal_cdf(x) == doctest::Approx(oracle::half_normal_cdf(x)).epsilon(1e-4).scale(1));
  }
  const LaguerreEnsemble cubic(ModelParams::make(2, 2, 1));
  for (double x : {0.3, 1.0, 2.5}) {
    CHECK(laguerre_density(make_chamber_point({x}), cubic) ==
          doctest::Approx(x * x * x * std::exp(-x * x / 2) / 2).epsilon(1e-8));
  }
  const LaguerreEnsemble two(ModelParams::make(1, 2, 2));
  CHECK(laguerre_density(make_chamber_point({0.8, 0.8}), two) == 0.0);
  CHECK_THROWS_AS(laguerre_density(make_chamber_point({0.8, 0.8}), LaguerreEnsemble(ModelParams::make(1, 2, 1))),
                  Error);

  for (auto [d, p] : {std::pair{1, 2.0}, {2, 3.0}, {1, 3.5}, {4, 2.0}}) {
    const LaguerreEnsemble ens(ModelParams::make(d, p, 2));
    const double total = chamber_integral(
        [&](double a, double b) { return laguerre_density(make_chamber_point({a, b}), ens); }, 8.0, 200);
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("Laguerre sampler") {
  Rng rng = make_stream(17, 0);
  const LaguerreEnsemble half_normal(ModelParams::make(1, 1, 1));
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(laguerre_sample(half_normal, rng).coords[0]);
  const MeanSe s = mean_se(xs);
  CHECK(std::abs(s.mean - std::sqrt(2 / pi)) < 3 * s.std_error);

  for (auto [d, p] : {std::pair{2, 3.0}, {1, 4.0}}) {
    const LaguerreEnsemble ens(ModelParams::make(d, p, 1));
    std::vector<double> v;
    for (int i = 0; i < 100000; ++i) v.push_back(laguerre_sample(ens, rng).coords[0]);
    std::sort(v.begin(), v.end());
    CHECK(ks_distance(v, [&](double t) { return ens.first_marginal_cdf(t); }) < 0.01);
  }

  for (auto [d, p, q] : {std::tuple{1, 2, 2}, {2, 3, 2}, {4, 2, 1}, {4, 3, 2}}) {
    const LaguerreEnsemble ens(ModelParams::make(d, p, q));
    std::vector<double> norm2;
    for (int i = 0; i < 50000; ++i) {
      const auto x = laguerre_sample(ens, rng);
      double s2 = 0;
      for (int j = 0; j < q; ++j) {
        CHECK(x.coords[j] >= 0.0);
        if (j > 0) CHECK(x.coords[j - 1] >= x.coords[j]);
        s2 += x.coords[j] * x.coords[j];
      }
      norm2.push_back(s2);
    }
    const MeanSe m = mean_se(norm2);
    CAPTURE(d);
    CAPTURE(p);
    CHECK(std::abs(m.mean - p * q * d) < 3 * m.std_error);
  }
  try {
    laguerre_sample(LaguerreEnsemble(ModelParams::make(1, 2.5, 1)), rng);
    FAIL("expected NonIntegerP");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegerP);
  }
}

TEST_CASE("quadrature moments agree with the sampler") {
  Rng rng = make_stream(23, 0);
  const LaguerreEnsemble ens(ModelParams::make(1, 2, 2));
  const auto means = ens.coordinate_means();
  const auto second = ens.coordinate_second_moments();
  std::vector<double> x1, x2;
  for (int i = 0; i < 100000; ++i) {
    const auto x = laguerre_sample(ens, rng);
    x1.push_back(x.coords[0]);
    x2.push_back(x.coords[1]);
  }
  const MeanSe m1 = mean_se(x1), m2 = mean_se(x2);
  CHECK(std::abs(m1.mean - means[0]) < 4 * m1.std_error);
  CHECK(std::abs(m2.mean - means[1]) < 4 * m2.std_error);
  CHECK(second[0] + second[1] == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("Gaussian transform, small run") {
  const auto params = ModelParams::make(1, 1, 1);
  const std::vector<double> zero{0.0}, one{1.0};
  const auto r0 = gaussian_transform_residual(zero, params, 1000, 100, 3);
  CHECK(r0.residual == 0.0);
  const auto r1 = gaussian_transform_residual(one, params, 20000, 1000, 3, 4);
  CHECK(r1.target == doctest::Approx(std::exp(-0.5)));
  CHECK(r1.residual < 3 * r1.std_error);
  const auto again = gaussian_transform_residual(one, params, 20000, 1000, 3, 1);
  CHECK(again.estimate == r1.estimate);
}
