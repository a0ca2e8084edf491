#include <doctest.h>

#include <cmath>
#include <limits>

#include "flexneedlet/needlet_frame.hpp"
#include "generators.hpp"

using namespace flexneedlet;

namespace {

NeedletSystem geometric(int J) { return NeedletSystem(WindowSystem(build_scales(ShiftModel::standard_geometric(2.0), J))); }

std::vector<double> angles(int n) {
  std::vector<double> th(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) th[static_cast<std::size_t>(i)] = kPi * (i + 1) / n;
  return th;
}

}  // namespace

TEST_SUITE("needlet_frame") {

TEST_CASE("coverage") {
  const auto sys = geometric(6);
  CHECK(sys.covered_lmax() == 32);
  for (int l = 0; l <= 32; ++l) CHECK(std::abs(sys.coverage(l) - 1.0) < 1e-14);
  CHECK(sys.coverage(40) < 1.0);
  CHECK(sys.max_multipole() == 63);
}

TEST_CASE("kernel") {
  const auto sys = geometric(6);
  gen::Rng rng(1);
  const auto x = gen::point(rng);
  double expect = 0.0;
  const auto w = sys.window(3);
  for (std::size_t l = 0; l < w.size(); ++l) expect += w[l] * w[l] * (2.0 * l + 1.0) / kFourPi;
  CHECK(kernel_eval(sys, 3, x, x) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(kernel_eval(sys, 3, x, x) > 0.0);
  const NeedletSystem narrow(WindowSystem(ScaleSequence::from_centers({1.0, 10.2, 10.5, 10.9})));
  CHECK(narrow.support(2).empty());
  CHECK(kernel_eval(narrow, 2, x, x) == 0.0);
}

TEST_CASE("kernel reproduces under cubature") {
  const auto sys = geometric(5);
  const int j = 2;
  const auto g = build_grid(2 * sys.support(j).last, GridLayout::Reduced);
  gen::Rng rng(2);
  const auto x = gen::point(rng), z = gen::point(rng);
  double lhs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) lhs += g.weights[i] * kernel_eval(sys, j, x, g.points[i]) * kernel_eval(sys, j, g.points[i], z);
  double rhs = 0.0;
  const auto w = sys.window(j);
  for (std::size_t l = 0; l < w.size(); ++l) rhs += std::pow(w[l], 4) * projector_kernel(static_cast<int>(l), x, z);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("needlet evaluation") {
  const auto sys = geometric(6);
  const int j = 3;
  const std::size_t k = 17;
  const auto& grid = sys.grid(j);
  // Peak at the centre.
  const double centre = needlet_eval(sys, j, k, grid.points[k]);
  gen::Rng rng(4);
  for (int i = 0; i < 500; ++i) CHECK(std::abs(needlet_eval(sys, j, k, gen::point(rng))) <= centre + 1e-12);
  // sqrt(lambda) scaling.
  const double t[1] = {0.3};
  double a[1], b[1];
  needlet_profile(sys, j, 1.0, t, a);
  needlet_profile(sys, j, 2.0, t, b);
  CHECK(b[0] == doctest::Approx(std::sqrt(2.0) * a[0]));
  // Agrees with the harmonic expansion of psi.
  auto f = BandlimitedFunction::zero(sys.support(j).last);
  std::vector<double> y(harmonic_count(f.lmax));
  real_spherical_harmonics(f.lmax, grid.points[k], y);
  for (int l = sys.support(j).first; l <= f.lmax; ++l) {
    for (int m = -l; m <= l; ++m) f.coefficient(l, m) = std::sqrt(grid.weights[k]) * sys.window(j)[l] * y[harmonic_index(l, m)];
  }
  const auto p = gen::point(rng);
  CHECK(needlet_eval(sys, j, k, p) == doctest::Approx(f.eval(p)).epsilon(1e-11));
}

TEST_CASE("single harmonic at a window peak") {
  const auto sys = geometric(6);
  const int l0 = 8;  // S_3
  const auto f = BandlimitedFunction::single(sys.max_multipole(), l0, 3);
  const auto c = analyze(sys, f);
  double level3 = 0.0;
  for (double v : c.beta[3]) level3 += v * v;
  CHECK(level3 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.energy() == doctest::Approx(1.0).epsilon(1e-12));
  // Between centres two levels share the energy.
  const auto g = BandlimitedFunction::single(sys.max_multipole(), 6, -2);
  const auto d = analyze(sys, g);
  int active = 0;
  for (const auto& level : d.beta) {
    double e = 0.0;
    for (double v : level) e += v * v;
    if (e > 1e-14) ++active;
  }
  CHECK(active == 2);
  CHECK(d.energy() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero function") {
  const auto sys = geometric(5);
  const auto c = analyze(sys, BandlimitedFunction::zero(10));
  for (const auto& level : c.beta) {
    for (double v : level) CHECK(v == 0.0);
  }
  const auto f = synthesize(sys, c);
  for (double v : f.coeffs) CHECK(v == 0.0);
  CHECK_THROWS_AS(frame_energy_gap(sys, BandlimitedFunction::zero(3)), std::invalid_argument);
}

TEST_CASE("property: tight frame and round trip") {
  gen::Rng rng(31);
  const NeedletSystem systems[] = {geometric(6),
                                   NeedletSystem(WindowSystem(build_scales(ShiftModel::polynomial(2.0), 3))),
                                   NeedletSystem(WindowSystem(build_scales(ShiftModel::mild_exponential(1.0, 0.5), 5)))};
  for (const auto& sys : systems) {
    for (int trial = 0; trial < 5; ++trial) {
      const int lmax = gen::integer(rng, 1, std::min(30, sys.covered_lmax()));
      const auto f = gen::function(rng, lmax);
      CHECK(frame_energy_gap(sys, f) < 1e-12);
      const auto back = synthesize(sys, analyze(sys, f), lmax);
      double err = 0.0;
      for (std::size_t i = 0; i < f.coeffs.size(); ++i) err += std::pow(back.coeffs[i] - f.coeffs[i], 2);
      CHECK(std::sqrt(err / f.norm_squared()) < 1e-12);
    }
  }
}

TEST_CASE("single-level synthesis is the band-pass projection") {
  const auto sys = geometric(6);
  gen::Rng rng(32);
  const auto f = gen::function(rng, 16);
  auto c = analyze(sys, f);
  for (int j = 0; j <= sys.last_level(); ++j) {
    if (j != 3) std::fill(c.beta[j].begin(), c.beta[j].end(), 0.0);
  }
  const auto g = synthesize(sys, c, 16);
  for (int l = 0; l <= 16; ++l) {
    const double b = l < static_cast<int>(sys.window(3).size()) ? sys.window(3)[l] : 0.0;
    for (int m = -l; m <= l; ++m) CHECK(std::abs(g.coefficient(l, m) - b * b * f.coefficient(l, m)) < 1e-12);
  }
}

TEST_CASE("uncovered energy is reported or rejected") {
  const auto sys = geometric(5);
  auto f = BandlimitedFunction::zero(sys.max_multipole());
  f.coefficient(2, 0) = 1.0;
  f.coefficient(sys.max_multipole(), 1) = 1.0;
  CHECK_THROWS_AS(analyze(sys, f), CoverageError);
  const auto c = analyze(sys, f, CoveragePolicy::Report);
  const double missing = 1.0 - sys.coverage(sys.max_multipole());
  CHECK(c.uncovered_energy == doctest::Approx(missing));
  CHECK(frame_energy_gap(sys, f) == doctest::Approx(missing / 2.0).epsilon(1e-10));
}

TEST_CASE("synthesis is the adjoint of analysis") {
  const auto sys = geometric(5);
  gen::Rng rng(33);
  const auto f = gen::function(rng, sys.max_multipole());
  NeedletCoefficients c;
  std::normal_distribution<double> n;
  for (int j = 0; j <= sys.last_level(); ++j) {
    c.beta.emplace_back(sys.grid(j).size());
    for (double& v : c.beta.back()) v = n(rng);
  }
  const auto a = analyze(sys, f, CoveragePolicy::Report);
  double lhs = 0.0;
  for (std::size_t j = 0; j < c.beta.size(); ++j) {
    for (std::size_t k = 0; k < c.beta[j].size(); ++k) lhs += a.beta[j][k] * c.beta[j][k];
  }
  const auto g = synthesize(sys, c, f.lmax);
  double rhs = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) rhs += f.coeffs[i] * g.coeffs[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
}

TEST_CASE("localization profile") {
  const auto sys = geometric(6);
  const int j = 4;
  const std::size_t k = representative_point(sys, j);
  const auto th = angles(4000);
  const auto p = localization_profile(sys, j, k, th);
  // theta -> 0 approaches the centre value
  const double tiny[1] = {1e-7};
  const auto q = localization_profile(sys, j, k, tiny);
  CHECK(q.psi[0] == doctest::Approx(needlet_eval(sys, j, k, sys.grid(j).points[k])).epsilon(1e-9));
  CHECK(envelope_monotone(p));
  CHECK(p.abs_psi.back() < 0.01 * p.abs_psi.front());
  const double s4 = sys.scales().center(j);
  const auto fits = fit_localization(sys, p, 5.0 / s4, 50.0 / s4);
  CHECK(fits.lower_scale.points > 100);
  CHECK(fits.lower_scale.exponent > 1.0);
  CHECK(main_lobe_radius(p) > 0.0);
  CHECK(main_lobe_radius(p) < 5.0 / s4);
  const double bad[] = {0.2, 0.1};
  CHECK_THROWS_AS(localization_profile(sys, j, k, bad), std::invalid_argument);
}

TEST_CASE("envelope checks on synthetic profiles") {
  LocalizationProfile p;
  p.theta = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  p.psi = {1.0, 0.5, -0.1, -0.15, 0.05, -0.3, 0.01};
  for (double v : p.psi) p.abs_psi.push_back(std::abs(v));
  p.envelope = {1.0, 0.5, 0.3, 0.3, 0.3, 0.3, 0.01};
  CHECK(envelope_monotone(p));
  // The second side lobe is higher than the first.
  CHECK_FALSE(local_peaks_nonincreasing(p));
  CHECK(main_lobe_radius(p) == doctest::Approx(0.3));
  CHECK(envelope_width(p, 0.25) == doctest::Approx(0.7));
  CHECK(envelope_width(p, 0.4) == doctest::Approx(0.3));
  p.envelope[3] = 0.35;  // not a running maximum
  CHECK_FALSE(envelope_monotone(p));
  p.envelope = {1.0, 0.5, 1.5, 1.5, 1.5, 1.5, 0.01};  // side lobe above the main peak
  p.psi[3] = -1.5;
  p.abs_psi[3] = 1.5;
  CHECK_FALSE(envelope_monotone(p));
  p.psi[5] = -0.1;
  p.abs_psi = {1.0, 0.5, 0.1, 0.15, 0.05, 0.1, 0.01};
  CHECK(local_peaks_nonincreasing(p));
}

TEST_CASE("decay fit recovers a power law") {
  std::vector<double> th, v;
  for (int i = 1; i <= 500; ++i) {
    th.push_back(0.001 * i);
    v.push_back(std::pow(1.0 + 40.0 * th.back(), -3.0) * (1.0 + 0.3 * std::cos(200.0 * th.back())));
  }
  const auto fit = fit_envelope_decay(th, v, 40.0, 0.05, 0.5);
  CHECK(fit.exponent == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("L^q norms") {
  const NeedletSystem sys(WindowSystem(build_scales(ShiftModel::polynomial(2.0), 5)));
  for (int j = 1; j <= 3; ++j) {
    const std::size_t k = representative_point(sys, j);
    const double two = lq_norm(sys, j, k, 2.0);
    CHECK(two * two == doctest::Approx(l2_norm_squared_spectral(sys, j, k)).epsilon(1e-12));
    const double inf = lq_norm(sys, j, k, std::numeric_limits<double>::infinity());
    CHECK(inf == doctest::Approx(std::abs(needlet_eval(sys, j, k, sys.grid(j).points[k]))).epsilon(1e-12));
    // Hölder: ||psi||_2^2 <= ||psi||_1 ||psi||_inf.
    CHECK(two * two <= lq_norm(sys, j, k, 1.0) * inf * (1.0 + 1e-10));
    // q = 4 is exact with the even-integer rule; a general q close to it agrees.
    CHECK(lq_norm(sys, j, k, 4.0) == doctest::Approx(lq_norm(sys, j, k, 4.0 + 1e-9)).epsilon(1e-7));
  }
  CHECK_THROWS_AS(lq_norm(sys, 1, 0, 0.5), std::invalid_argument);
}

TEST_CASE("coefficients csv") {
  const auto sys = geometric(3);
  const auto c = analyze(sys, BandlimitedFunction::single(2, 1, 0));
  const auto csv = coefficients_csv(sys, c);
  CHECK(csv.rfind("j,k,theta_k,phi_k,beta\n0,0,", 0) == 0);
}

}
