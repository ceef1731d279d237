#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "grasswalk/error.hpp"
#include "grasswalk/hypergroup.hpp"
#include "grasswalk/polynomials.hpp"
#include "oracles.hpp"

using namespace grasswalk;

namespace {

QuadratureGrid grid_for(const ModelParams& params, int degree) {
  return make_grid(params.q(), default_nodes_per_axis(params.k(), degree), params.k());
}

// Rank-one linearization by Gauss-Jacobi quadrature in u = cos 2x.
double classical_coefficient(int l, int m, int t, const ModelParams& params) {
  const double a = params.alpha(), b = params.beta();
  const auto rule = oracle::gauss_jacobi(40, a, b);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const double rt = oracle::jacobi_hypergeometric(t / 2, a, b, u);
    num += rule.weights[i] * oracle::jacobi_hypergeometric(l / 2, a, b, u) *
           oracle::jacobi_hypergeometric(m / 2, a, b, u) * rt;
    den += rule.weights[i] * rt * rt;
  }
  return num / den;
}

WeightMeasure random_measure(int q, int max_first, std::mt19937_64& gen) {
  const auto ws = enumerate_weights(q, max_first);
  std::uniform_int_distribution<std::size_t> pick(0, ws.size() - 1);
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  WeightMeasure nu;
  double total = 0.0;
  std::vector<std::pair<Weight, double>> items;
  for (int i = 0; i < 3; ++i) {
    items.emplace_back(ws[pick(gen)], mass(gen));
    total += items.back().second;
  }
  for (const auto& [w, m] : items) nu.add(w, m / total);
  return nu;
}

}  // namespace

TEST_CASE("oracle Gauss-Jacobi rule integrates moments") {
  const double a = 0.5, b = -0.5;
  const auto rule = oracle::gauss_jacobi(20, a, b);
  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mass += rule.weights[i];
    first += rule.weights[i] * rule.nodes[i];
  }
  // 2^(a+b+1) Gamma(a+1) Gamma(b+1) / Gamma(a+b+2) = pi for a = 1/2, b = -1/2.
  CHECK(mass == doctest::Approx(std::numbers::pi).epsilon(1e-13));
  CHECK(first / mass == doctest::Approx((b - a) / (a + b + 2)).epsilon(1e-13));
}

TEST_CASE("linearization examples") {
  const auto p11 = ModelParams::make(1, 1, 1);
  const auto g = grid_for(p11, 8);
  const auto prod = linearize(make_weight({2}), make_weight({2}), p11, g);
  CHECK(std::abs(prod.mass(make_weight({0})) - 0.5) < 1e-8);
  CHECK(std::abs(prod.mass(make_weight({4})) - 0.5) < 1e-8);
  CHECK(std::abs(prod.mass(make_weight({2}))) < 1e-12);

  const auto p23 = ModelParams::make(1, 3, 2);
  const auto unit = linearize(make_weight({4, 2}), Weight::zero(2), p23, grid_for(p23, 4));
  CHECK(unit.size() == 1);
  CHECK(unit.mass(make_weight({4, 2})) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank-one linearization against Gauss-Jacobi quadrature") {
  for (auto [d, p] : {std::pair{1, 3.0}, {2, 1.0}, {4, 2.5}, {1, 2.0}}) {
    const auto params = ModelParams::make(d, p, 1);
    const auto hg = Hypergroup::shared(params, 16);
    for (int l : {2, 4, 8}) {
      for (int m : {2, 6, 8}) {
        const auto prod = hg->product(make_weight({l}), make_weight({m}));
        for (int t = 0; t <= l + m; t += 2) {
          CHECK(std::abs(prod.mass(make_weight({t})) - classical_coefficient(l, m, t, params)) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("row sums, support and nonnegativity on a test matrix") {
  for (int q : {1, 2}) {
    for (int d : {1, 2, 4}) {
      for (double p : {double(q), q + 1.0, 2 * q + 0.5}) {
        const auto params = ModelParams::make(d, p, q);
        const auto hg = Hypergroup::shared(params, 16);
        for (const auto& lambda : enumerate_weights(q, 8)) {
          for (const auto& mu : enumerate_weights(q, 8)) {
            const auto& row = hg->row(lambda, mu);
            CAPTURE(params.describe());
            CAPTURE(to_string(lambda));
            CAPTURE(to_string(mu));
            CHECK(std::abs(row.raw_sum - 1.0) < 1e-8);
            CHECK(row.outside_support < 1e-8);
            for (std::size_t t : row.support) CHECK(dominance_leq(hg->weight(t), lambda + mu));
            if (params.integer_p()) CHECK(row.most_negative > -1e-8);
          }
        }
      }
    }
  }
}

TEST_CASE("convolution") {
  const auto p11 = ModelParams::make(1, 1, 1);
  const auto g = grid_for(p11, 8);
  std::mt19937_64 gen(2);
  const auto nu = random_measure(1, 4, gen);
  const auto unit = convolve(nu, WeightMeasure::dirac(Weight::zero(1)), p11, g);
  for (const auto& [w, m] : nu) CHECK(unit.mass(w) == doctest::Approx(m).epsilon(1e-12));
  CHECK(unit.size() == nu.size());

  const auto sq = convolve(WeightMeasure::dirac(make_weight({2})), WeightMeasure::dirac(make_weight({2})), p11, g);
  CHECK(std::abs(sq.mass(make_weight({0})) - 0.5) < 1e-8);
  CHECK(std::abs(sq.mass(make_weight({4})) - 0.5) < 1e-8);

  const auto p23 = ModelParams::make(1, 3, 2);
  const auto g2 = grid_for(p23, 8);
  for (int i = 0; i < 5; ++i) {
    const auto a = random_measure(2, 4, gen), b = random_measure(2, 4, gen);
    const auto ab = convolve(a, b, p23, g2), ba = convolve(b, a, p23, g2);
    for (const auto& [w, m] : ab) CHECK(std::abs(m - ba.mass(w)) < 1e-12);
    CHECK(ab.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Haar weights") {
  const auto p11 = ModelParams::make(1, 1, 1);
  CHECK(haar_weight(Weight::zero(1), p11, grid_for(p11, 2)) == doctest::Approx(1.0));
  CHECK(haar_weight(make_weight({2}), p11, grid_for(p11, 2)) == doctest::Approx(2.0).epsilon(1e-8));
  for (auto [d, p] : {std::pair{1, 3.0}, {2, 2.0}, {4, 4.5}}) {
    const auto params = ModelParams::make(d, p, 2);
    const auto hg = Hypergroup::shared(params, 24);
    for (const auto& lambda : enumerate_weights(2, 12)) {
      CHECK(hg->row(lambda, lambda).coeffs.front() * hg->haar_weight(lambda) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("admissibility scan") {
  const auto p23 = ModelParams::make(1, 3, 2);
  const auto r = check_admissible(WeightMeasure::dirac(make_weight({2, 0})), p23, grid_for(p23, 10), 8);
  CHECK(r.admissible_up_to_cap);
  CHECK(r.rows_scanned == enumerate_weights(2, 8).size());
  const auto trivial = check_admissible(WeightMeasure::dirac(Weight::zero(2)), p23, grid_for(p23, 8), 8);
  CHECK(trivial.admissible_up_to_cap);
  const auto p25 = ModelParams::make(1, 2.5, 2);
  const auto open = check_admissible(WeightMeasure::dirac(make_weight({2, 0})), p25, grid_for(p25, 10), 8);
  CHECK(open.rows_scanned > 0);
  MESSAGE("p=2.5, q=2: most negative coefficient " << open.most_negative);
}

TEST_CASE("modified variance, moments and the Fourier transform") {
  const auto p11 = ModelParams::make(1, 1, 1);
  const auto g = grid_for(p11, 4);
  CHECK(modified_variance(WeightMeasure::dirac(Weight::zero(1)), p11, g) == 0.0);
  CHECK(modified_variance(WeightMeasure::dirac(make_weight({2})), p11, g) == doctest::Approx(4.0).epsilon(1e-10));
  auto mix = parse_measure("0:0.5;2:0.5", 1);
  CHECK(modified_variance(mix, p11, g) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fourier_transform(WeightMeasure::dirac(Weight::zero(1)), make_chamber_point({0.7}), p11, g) == 1.0);

  std::mt19937_64 gen(6);
  for (auto [d, p, q] : {std::tuple{1, 3.0, 2}, {2, 2.0, 2}, {4, 1.5, 1}}) {
    const auto params = ModelParams::make(d, p, q);
    const auto hg = Hypergroup::shared(params, 16);
    for (int i = 0; i < 4; ++i) {
      const auto a = random_measure(q, 6, gen), b = random_measure(q, 6, gen);
      const double s2 = hg->modified_variance(a);
      auto f = [&](const std::vector<double>& x) { return hg->fourier(a, x); };
      const std::vector<double> origin(q, 0.0);
      for (int j = 0; j < q; ++j) {
        CHECK(oracle::second_derivative(f, origin, j, 1e-3) == doctest::Approx(-s2).epsilon(1e-5));
      }
      if (q == 2) {
        const double h = 1e-3;
        const double mixed = (f({h, h}) - f({h, -h}) - f({-h, h}) + f({-h, -h})) / (4 * h * h);
        CHECK(std::abs(mixed) < 1e-5 * s2);
      }
      const auto ab = hg->convolve(a, b);
      CHECK(hg->modified_variance(ab) == doctest::Approx(s2 + hg->modified_variance(b)).epsilon(1e-8));
      std::vector<double> x(q);
      for (auto& v : x) v = std::uniform_real_distribution<double>(0.0, 1.5)(gen);
      CHECK(std::abs(hg->fourier(ab, x) - hg->fourier(a, x) * hg->fourier(b, x)) < 1e-10);
    }
    for (const auto& lambda : enumerate_weights(q, 8)) {
      for (const auto& tau : enumerate_weights(q, 8)) {
        const auto prod = hg->product(lambda, tau);
        double integral = 0.0;
        for (const auto& [w, m] : prod) integral += m * hg->moment(w);
        CHECK(integral == doctest::Approx(hg->moment(lambda) + hg->moment(tau)).epsilon(1e-8).scale(1));
      }
    }
    double c1 = 1.0;
    for (std::size_t j = 1; j < hg->basis().size(); ++j) {
      const double l1 = hg->weight(j).first();
      const double m = hg->moment(j);
      CHECK(m <= l1 * l1 * (1 + 1e-10));
      c1 = std::min(c1, m / (l1 * l1));
    }
    CHECK(c1 > 0.0);
    MESSAGE(params.describe() << ": empirical C1 = " << c1);
  }
}

TEST_CASE("measures: parsing and validation") {
  const auto nu = parse_measure("2,0:0.5; 4,2:0.5", 2);
  CHECK(nu.size() == 2);
  CHECK(nu.mass(make_weight({4, 2})) == 0.5);
  CHECK(parse_measure(to_string(nu), 2) == nu);
  CHECK_NOTHROW(require_probability(nu));
  CHECK_THROWS_AS(require_probability(parse_measure("2:0.7", 1)), Error);
  CHECK_THROWS_AS(require_probability(parse_measure("2:1.5;0:-0.5", 1)), Error);
  CHECK_THROWS_AS(parse_measure("2", 1), Error);
  CHECK_THROWS_AS(parse_measure("2:x", 1), Error);
  CHECK_THROWS_AS(parse_measure("3:1", 1), Error);
  CHECK_THROWS_AS(parse_measure("", 1), Error);
}

TEST_CASE("row cache persistence") {
  const auto params = ModelParams::make(2, 3, 2);
  Hypergroup first(params, 8);
  const auto& row = first.row(make_weight({4, 2}), make_weight({4, 0}));
  first.row(make_weight({2, 0}), make_weight({2, 2}));
  const auto file = std::filesystem::temp_directory_path() / "grasswalk_rows_test.json";
  first.save(file);

  Hypergroup second(params, 8);
  CHECK(second.load(file) == 2);
  CHECK(second.cached_rows() == 2);
  const auto& again = second.row(make_weight({4, 0}), make_weight({4, 2}));
  CHECK(again.support == row.support);
  CHECK(again.coeffs == row.coeffs);
  CHECK(again.cumulative == row.cumulative);

  Hypergroup other(params, 10);
  CHECK(other.load(file) == 0);
  std::filesystem::remove(file);
  CHECK(second.load(file) == 0);

  try {
    first.row(make_weight({6, 0}), make_weight({4, 0}));
    FAIL("expected DegreeCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeCapExceeded);
  }
}
