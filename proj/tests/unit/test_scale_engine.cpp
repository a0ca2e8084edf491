#include <doctest.h>

#include <cmath>

#include "flexneedlet/scale_engine.hpp"
#include "generators.hpp"

using namespace flexneedlet;

TEST_SUITE("scale_engine") {

TEST_CASE("shift values") {
  CHECK(shift_value(ShiftModel::polynomial(1.0), 4) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(shift_value(ShiftModel::standard_geometric(2.0), 7) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  // arbitrary-precision value of 1 / (8 log 8)
  CHECK(std::abs(shift_value(ShiftModel::logarithmic(1.0), 8) - 0.0601122933703734753) < 1e-16);
  CHECK_THROWS_AS(shift_value(ShiftModel::logarithmic(1.0), 1), std::invalid_argument);
  CHECK_THROWS_AS(shift_value(ShiftModel::polynomial(1.0), 0), std::invalid_argument);
}

TEST_CASE("log-containing families continue the first defined shift") {
  const auto m = ShiftModel::logarithmic(2.0);
  CHECK(effective_shift(m, 0) == shift_value(m, 2));
  CHECK(effective_shift(m, 1) == shift_value(m, 2));
  CHECK(effective_shift(m, 5) == shift_value(m, 5));
  const auto p = ShiftModel::polynomial(1.5);
  CHECK(effective_shift(p, 0) == shift_value(p, 1));
}

TEST_CASE("factories reject invalid parameters") {
  CHECK_THROWS_AS(ShiftModel::polynomial(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ShiftModel::mild_exponential(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ShiftModel::standard_geometric(1.0), std::invalid_argument);
  CHECK_THROWS_AS(ShiftModel::log_power_exponential(1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(ShiftModel::explicit_table({1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(ShiftModel::explicit_table({}), std::invalid_argument);
  CHECK_THROWS_AS(build_scales(ShiftModel::polynomial(1.0), 2), std::invalid_argument);
}

TEST_CASE("geometric centers are exact powers") {
  const auto s = build_scales(ShiftModel::standard_geometric(2.0), 5);
  REQUIRE(s.last_index() == 5);
  for (int j = 0; j <= 5; ++j) CHECK(s.center(j) == doctest::Approx(std::ldexp(1.0, j)).epsilon(1e-14));
  for (int j = 1; j <= 4; ++j) CHECK(std::abs(s.bandwidth_ratio(j) - 1.5) < 1e-13);
}

TEST_CASE("explicit centers") {
  const auto s = ScaleSequence::from_centers({1.0, 3.0, 9.0, 27.0});
  for (int j = 0; j < 3; ++j) CHECK(s.dilation_factor(j) == doctest::Approx(3.0));
  CHECK(s.bandwidth_ratio(1) == doctest::Approx(8.0 / 3.0));
  const auto t = ScaleSequence::from_centers({1.0, 2.0, 4.0, 8.0});
  CHECK(t.bandwidth_ratio(2) == doctest::Approx(1.5));
  CHECK(t.log_growth_index(2) == doctest::Approx(std::log(2.0)));
  CHECK(t.separation_ratio(1, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ScaleSequence::from_centers({2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(t.bandwidth_ratio(0), std::out_of_range);
  CHECK_THROWS_AS(t.bandwidth_ratio(3), std::out_of_range);
}

TEST_CASE("explicit table shifts accumulate in order") {
  const auto s = build_scales(ShiftModel::explicit_table({std::log(3.0), std::log(3.0), std::log(3.0)}), 3);
  CHECK(s.center(3) == doctest::Approx(27.0));
  CHECK(s.regime() == Regime::Undetermined);
  CHECK_THROWS_AS(build_scales(ShiftModel::explicit_table({0.5, 0.5}), 3), std::invalid_argument);
}

TEST_CASE("property: centers strictly increase and dilations exceed 1") {
  gen::Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto family = gen::all_families()[static_cast<std::size_t>(trial) % gen::all_families().size()];
    const auto m = gen::model(rng, family);
    const int J = family == ShiftFamily::ExplicitTable ? 12 : gen::integer(rng, 3, 40);
    const auto s = build_scales(m, J);
    CHECK(s.center(0) == 1.0);
    for (int j = 0; j < s.last_index(); ++j) {
      CHECK(s.log_center(j + 1) > s.log_center(j));
      CHECK(s.dilation_factor(j) > 1.0);
    }
  }
}

TEST_CASE("overflowing sequences are truncated") {
  const auto s = build_scales(ShiftModel::double_exponential(1.0, 3.0), 40);
  CHECK(s.truncated());
  CHECK(s.last_index() < 40);
  CHECK(std::isfinite(s.center(s.last_index())));
  const auto t = build_scales(ShiftModel::stretched_super_exponential(0.5), 64);
  CHECK_FALSE(t.truncated());
}

TEST_CASE("regime labels") {
  CHECK(build_scales(ShiftModel::polynomial(1.0), 64).regime() == Regime::Shrinking);
  CHECK(build_scales(ShiftModel::polynomial(2.0), 64).regime() == Regime::Shrinking);
  CHECK(build_scales(ShiftModel::logarithmic(1.0), 64).regime() == Regime::Shrinking);
  CHECK(build_scales(ShiftModel::log_power_exponential(1.0, 0.5), 64).regime() == Regime::Shrinking);
  CHECK(build_scales(ShiftModel::mild_exponential(1.0, 0.5), 64).regime() == Regime::Shrinking);
  CHECK(build_scales(ShiftModel::standard_geometric(2.0), 64).regime() == Regime::Stable);
  CHECK(build_scales(ShiftModel::stretched_super_exponential(0.5), 64).regime() == Regime::Spreading);
  CHECK(build_scales(ShiftModel::double_exponential(0.1, 1.2), 64).regime() == Regime::Spreading);
  CHECK_THROWS_AS(classify_regime(build_scales(ShiftModel::polynomial(1.0), 8)), std::invalid_argument);
}

TEST_CASE("convergence subcase") {
  const auto poly = build_scales(ShiftModel::polynomial(1.0), 64);
  CHECK(poly.convergence() == Convergence::Divergent);
  CHECK(build_scales(ShiftModel::standard_geometric(2.0), 64).convergence() == Convergence::NotApplicable);
  // Centers that settle: shifts 2^-k.
  std::vector<double> c{1.0};
  for (int k = 0; k < 40; ++k) c.push_back(c.back() * std::exp(std::ldexp(1.0, -k)));
  const auto settled = ScaleSequence::from_centers(c);
  CHECK(settled.regime() == Regime::Shrinking);
  CHECK(settled.convergence() == Convergence::TotallyConvergent);
}

TEST_CASE("asymptotic bandwidth ratios") {
  const int j = 10000;
  const auto poly = build_scales(ShiftModel::polynomial(2.0), j + 1);
  CHECK(std::abs(j * poly.bandwidth_ratio(j) / 4.0 - 1.0) < 0.05);
  const auto geo = build_scales(ShiftModel::standard_geometric(3.0), 64);
  for (int k = 1; k < 64; ++k) CHECK(std::abs(geo.bandwidth_ratio(k) - (3.0 - 1.0 / 3.0)) < 1e-12);
  // Delta_j ~ eps_j + eps_{j-1} ~ 2 eta j^-p for the mild exponential family.
  const auto mild = build_scales(ShiftModel::mild_exponential(1.0, 0.5), j + 1);
  CHECK(std::abs(mild.bandwidth_ratio(j) * std::sqrt(double(j)) / 2.0 - 1.0) < 0.05);
}

TEST_CASE("closed forms") {
  CHECK(closed_form_scale(ShiftModel::polynomial(3.0), 100.0) == doctest::Approx(1e6));
  CHECK(closed_form_scale(ShiftModel::logarithmic(2.0), std::exp(10.0)) == doctest::Approx(100.0));
  CHECK(closed_form_scale(ShiftModel::mild_exponential(1.0, 0.5), 16.0) == doctest::Approx(std::exp(8.0)));
  CHECK_THROWS_AS(closed_form_scale(ShiftModel::explicit_table({1.0}), 3.0), std::invalid_argument);
  // S_j / j^eta settles for the polynomial family.
  const auto s = build_scales(ShiftModel::polynomial(2.0), 4000);
  const double r1 = s.center(2000) / (2000.0 * 2000.0), r2 = s.center(4000) / (4000.0 * 4000.0);
  CHECK(std::abs(r1 / r2 - 1.0) < 1e-3);
}

TEST_CASE("separation ratio and threshold") {
  CHECK(separation_threshold_check(ShiftModel::polynomial(4.0), 0.5).satisfied_from.has_value());
  CHECK_FALSE(separation_threshold_check(ShiftModel::polynomial(1.0), 0.5).satisfied_from.has_value());
  for (double beta : {0.1, 0.5, 0.9}) {
    CHECK(separation_threshold_check(ShiftModel::mild_exponential(0.7, 0.5), beta).satisfied_from.has_value());
    CHECK_FALSE(separation_threshold_check(ShiftModel::logarithmic(1.0), beta).satisfied_from.has_value());
  }
  // R_j -> 0 for the logarithmic family.
  const auto log_seq = build_scales(ShiftModel::logarithmic(1.0), 2000);
  CHECK(log_seq.separation_ratio(2000, 0.5) < log_seq.separation_ratio(100, 0.5));
  CHECK(log_seq.separation_ratio(2000, 0.5) < 0.1);
  // The scan agrees with the materialized sequence.
  const auto m = ShiftModel::polynomial(3.0);
  const auto chk = separation_threshold_check(m, 0.5, 200);
  const auto seq = build_scales(m, 200);
  REQUIRE(chk.satisfied_from.has_value());
  for (int j = static_cast<int>(*chk.satisfied_from); j <= 200; ++j) CHECK(seq.separation_ratio(j, 0.5) > 1.0);
  if (*chk.satisfied_from > 1) CHECK(seq.separation_ratio(static_cast<int>(*chk.satisfied_from) - 1, 0.5) <= 1.0);
  // A family that starts below the threshold and crosses it later.
  const auto slow = ShiftModel::mild_exponential(0.3, 0.5);
  const auto late = separation_threshold_check(slow, 0.1);
  REQUIRE(late.satisfied_from.has_value());
  const int first = static_cast<int>(*late.satisfied_from);
  CHECK(first > 1);
  const auto late_seq = build_scales(slow, first + 50);
  CHECK(late_seq.separation_ratio(first - 1, 0.1) <= 1.0);
  for (int j = first; j <= first + 50; ++j) CHECK(late_seq.separation_ratio(j, 0.1) > 1.0);
}

TEST_CASE("localization rates") {
  CHECK(localization_rate(ShiftModel::polynomial(2.0), 10.0) == doctest::Approx(200.0));
  CHECK(localization_rate(ShiftModel::logarithmic(2.0), std::exp(3.0)) == doctest::Approx(6.0));
  const double mild = localization_rate(ShiftModel::mild_exponential(1.0, 0.5), 16.0);
  CHECK(mild == doctest::Approx(0.25 * std::exp(8.0)));
  CHECK_THROWS_AS(localization_rate(ShiftModel::standard_geometric(2.0), 4.0), std::invalid_argument);
  CHECK_THROWS_AS(localization_rate(ShiftModel::logarithmic(1.0), 4.0), std::invalid_argument);
}

TEST_CASE("csv layout") {
  const auto s = build_scales(ShiftModel::standard_geometric(2.0), 3);
  const std::string csv = s.to_csv();
  CHECK(csv.rfind("j,S,h,delta,L\n0,1,2,,\n", 0) == 0);
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  CHECK(last.rfind("3,", 0) == 0);
  CHECK(last.find(",,,") != std::string::npos);
}

TEST_CASE("family names round-trip") {
  for (auto f : gen::all_families()) CHECK(parse_family(family_name(f)) == f);
  CHECK_THROWS(parse_family("Nope"));
}

}
