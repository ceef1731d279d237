#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "experiment_config.hpp"
#include "grasswalk/error.hpp"
#include "grasswalk/parallel.hpp"
#include "grasswalk/rng.hpp"
#include "grasswalk/stats.hpp"
#include "output.hpp"

using namespace grasswalk;

TEST_CASE("random streams") {
  Rng a = make_stream(7, 3), b = make_stream(7, 3), c = make_stream(7, 4), d = make_stream(8, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  Rng r = make_stream(1, 0);
  std::vector<double> u, z;
  for (int i = 0; i < 200000; ++i) {
    const double v = uniform01(r);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    u.push_back(v);
    z.push_back(standard_normal(r));
  }
  const MeanSe mu = mean_se(u), mz = mean_se(z);
  CHECK(std::abs(mu.mean - 0.5) < 4 * mu.std_error);
  CHECK(std::abs(mz.mean) < 4 * mz.std_error);
  CHECK(mz.variance == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("statistics helpers") {
  const std::vector<double> v{1, 2, 3, 4};
  const MeanSe s = mean_se(v);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3));
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12)));
  CHECK(batch_means(v, 2).mean == 2.5);
  CHECK(batch_means(v, 2).std_error == doctest::Approx(1.0));

  const std::vector<double> sorted{0.1, 0.4, 0.7};
  const auto uniform = [](double t) { return std::clamp(t, 0.0, 1.0); };
  CHECK(ks_distance(sorted, uniform) == doctest::Approx(0.3));
  const std::vector<double> lattice{0, 0, 2, 2, 2, 4};
  CHECK(lattice_spacing(lattice) == 2.0);
  CHECK(quantile(v, 0.5) == 2.5);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  const std::vector<double> xs{1, 2, 3}, ys{3, 5, 7};
  const LinearFit f = linear_fit(xs, ys);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
}

TEST_CASE("parallel chunks") {
  std::vector<int> seen(1000, 0);
  parallel_chunks(seen.size(), 8, [&](std::size_t c) { seen[c] += 1; });
  for (int s : seen) CHECK(s == 1);
  try {
    parallel_chunks(100, 4, [](std::size_t c) {
      if (c == 17 || c == 63) throw std::runtime_error(std::to_string(c));
    });
    FAIL("expected rethrow");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}

TEST_CASE("error codes") {
  const Error e(ErrorCode::DegreeCapExceeded, "boom");
  CHECK(e.code() == ErrorCode::DegreeCapExceeded);
  CHECK(to_string(e.code()) == "DegreeCapExceeded");
  CHECK(std::string(e.what()).find("boom") != std::string::npos);
}

TEST_CASE("experiment config") {
  using grasswalk::cli::ExperimentConfig;
  const auto c = ExperimentConfig::parse("# comment\nd = 1\n\np=3.5\nnu=2,0:0.5;2,2:0.5\n");
  REQUIRE(c.entries().size() == 3);
  CHECK(*c.find("p") == "3.5");
  CHECK(*c.find("nu") == "2,0:0.5;2,2:0.5");
  CHECK(c.find("q") == nullptr);
  CHECK(ExperimentConfig::parse(c.to_text()) == c);
  CHECK_THROWS_AS(ExperimentConfig::parse("d"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("=3"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("d=1\nd=2"), Error);
  CHECK_THROWS_AS(ExperimentConfig::read("/nonexistent/grasswalk.cfg"), Error);
}

TEST_CASE("csv and json output") {
  using namespace grasswalk::cli;
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
  CHECK(csv_field("4,2") == "\"4,2\"");
  CHECK(csv_field("a\"b") == "\"a\"\"b\"");
  CHECK(csv_field("plain") == "plain");
  const auto dir = std::filesystem::temp_directory_path() / "grasswalk_output_test";
  std::filesystem::create_directories(dir);
  {
    CsvWriter w(dir / "t.csv", {"lambda", "c"});
    w.row({"4,2", "0.5"});
    w.close();
  }
  std::ifstream in(dir / "t.csv");
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == "lambda,c\n\"4,2\",0.5\n");
  write_json(dir / "t.json", {{"a", 1}});
  std::ifstream jin(dir / "t.json");
  CHECK(nlohmann::json::parse(jin)["a"] == 1);
  std::filesystem::remove_all(dir);
}
