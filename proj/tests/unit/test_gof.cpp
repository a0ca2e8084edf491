#include <doctest.h>

#include <cmath>

#include "flexneedlet/gof_test.hpp"
#include "generators.hpp"

using namespace flexneedlet;

TEST_SUITE("gof_test") {

TEST_CASE("spacing") {
  const auto s = ScaleSequence::from_centers({1.0, 4.0, 16.0, 64.0});
  CHECK(gof_spacing(s, 2, 0.5, 0.1) == doctest::Approx(std::pow(4.0, -0.4)));
  CHECK_THROWS_AS(gof_spacing(s, 0, 0.5, 0.1), std::out_of_range);
}

TEST_CASE("configuration checks") {
  GofConfig c;
  CHECK_NOTHROW(validate_gof(c));
  GofConfig bad = c;
  bad.levels.clear();
  CHECK_THROWS_AS(validate_gof(bad), std::invalid_argument);
  bad = c;
  bad.eps_sep = 0.6;
  CHECK_THROWS_AS(validate_gof(bad), std::invalid_argument);
  bad = c;
  bad.levels = {9};
  CHECK_THROWS_AS(validate_gof(bad), GofInfeasible);
  bad = c;
  bad.shift = ShiftModel::logarithmic(1.0);
  CHECK_THROWS_AS(validate_gof(bad), GofInfeasible);
  bad.require_separation = false;
  CHECK_NOTHROW(validate_gof(bad));
}

TEST_CASE("exact variance") {
  GofConfig c;
  c.levels = {3, 8};
  const NeedletSystem sys(WindowSystem(gof_scales(c)));
  const std::size_t one[] = {5};
  CHECK(exact_variance(sys, c.spectrum, 4, one) == doctest::Approx(2.0));
  // Valid separation keeps the inflation factor close to 1.
  for (int j = 3; j <= 8; ++j) {
    const auto d = gof_subsample(sys, j, 0.5, 0.1, 1);
    CHECK(min_separation(sys.grid(j), d) >= gof_spacing(sys.scales(), j, 0.5, 0.1));
    const double inflation = exact_variance(sys, c.spectrum, j, d) * d.size() / 2.0;
    CHECK(inflation >= 1.0);
    CHECK(inflation < 1.5);
  }
  // A slowly growing family has strongly correlated coefficients at a matched card.
  const NeedletSystem slow(WindowSystem(build_scales(ShiftModel::logarithmic(1.0), 200)));
  const auto all = subsample_separated(slow.grid(1), 0.0, 1);
  const auto valid = gof_subsample(sys, 4, 0.5, 0.1, 1);
  REQUIRE(all.size() < 2 * valid.size());
  REQUIRE(valid.size() < 2 * all.size());
  const double slow_inflation = exact_variance(slow, c.spectrum, 1, all) * all.size() / 2.0;
  const double valid_inflation = exact_variance(sys, c.spectrum, 4, valid) * valid.size() / 2.0;
  CHECK(slow_inflation > 3.0 * valid_inflation);
}

TEST_CASE("kolmogorov distance") {
  CHECK(kolmogorov_distance({0.0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(kolmogorov_distance({}), std::invalid_argument);
  // A sample far from N(0, 1).
  CHECK(kolmogorov_distance(std::vector<double>(50, 10.0)) == doctest::Approx(1.0));
}

TEST_CASE("small run") {
  GofConfig c;
  c.levels = {3};
  c.replicates = 400;
  c.seed = 3;
  const auto r = run_gof(c);
  REQUIRE(r.levels.size() == 1);
  const auto& l = r.levels[0];
  CHECK(l.card > 10);
  CHECK(l.min_distance >= l.spacing);
  CHECK(std::abs(l.mean) < 3.0 * l.mean_se);
  CHECK(std::abs(l.variance - l.exact_variance) < 3.0 * l.variance_se);
  CHECK(r.to_csv().rfind("j,card,mean,var,exact_var,skew,exkurt,ks\n3,", 0) == 0);
  CHECK(r.to_json().find("\"exact_variance\"") != std::string::npos);
  // Same seed, same result.
  CHECK(run_gof(c).to_csv() == r.to_csv());
}

}
