#include <doctest.h>

#include <cmath>

#include "flexneedlet/cubature.hpp"
#include "flexneedlet/sphere_harmonics.hpp"
#include "generators.hpp"

using namespace flexneedlet;

TEST_SUITE("sphere_harmonics") {

TEST_CASE("legendre values") {
  CHECK(legendre(2, 0.5) == doctest::Approx(-0.125).epsilon(1e-15));
  for (int l = 0; l <= 50; ++l) {
    CHECK(legendre(l, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(legendre(l, -1.0) == doctest::Approx(l % 2 ? -1.0 : 1.0).epsilon(1e-14));
  }
  CHECK(std::abs(legendre(7, 0.3) - (-0.22407298125000001677)) < 1e-15);
  CHECK(std::abs(legendre(30, -0.91) - 0.21278666663189697439) < 1e-13);
  CHECK_NOTHROW(legendre(3, 1.0 + 1e-13));
  CHECK_THROWS(legendre(3, 1.1));
}

TEST_CASE("legendre orthogonality by quadrature") {
  const auto rule = gauss_legendre(21);
  for (int l = 0; l <= 20; ++l) {
    for (int k = 0; k <= 20; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * legendre(l, rule.nodes[i]) * legendre(k, rule.nodes[i]);
      CHECK(std::abs(s - (l == k ? 2.0 / (2 * l + 1) : 0.0)) < 1e-13);
    }
  }
}

TEST_CASE("table matches single evaluations") {
  std::vector<double> t(41);
  legendre_table(40, 0.37, t);
  for (int l = 0; l <= 40; ++l) CHECK(t[l] == doctest::Approx(legendre(l, 0.37)).epsilon(1e-13));
}

TEST_CASE("projector kernel") {
  gen::Rng rng(3);
  const auto x = gen::point(rng), y = gen::point(rng);
  CHECK(projector_kernel(0, x, y) == doctest::Approx(1.0 / kFourPi));
  CHECK(projector_kernel(6, x, x) == doctest::Approx(13.0 / kFourPi));
}

TEST_CASE("associated legendre against high-precision values") {
  CHECK(std::abs(AssociatedLegendreTable(5, 0.4)(5, 3) - 0.11718635759735070748) < 1e-14);
  CHECK(std::abs(AssociatedLegendreTable(40, -0.2)(40, 17) - 0.30279717313232912480) < 1e-13);
  std::vector<double> col(24);
  associated_legendre_column(40, 17, -0.2, col);
  CHECK(col.back() == doctest::Approx(AssociatedLegendreTable(40, -0.2)(40, 17)).epsilon(1e-14));
}

TEST_CASE("associated legendre does not underflow at high order near the poles") {
  AssociatedLegendreTable t(1500, std::cos(0.05));
  CHECK(std::isfinite(t(1500, 1500)));
  CHECK(t(1500, 60) != 0.0);
}

TEST_CASE("real harmonics") {
  CHECK(real_spherical_harmonic(0, 0, SpherePoint(0.3, 1.0)) == doctest::Approx(1.0 / std::sqrt(kFourPi)));
  const SpherePoint p(1.1, 0.7);
  CHECK(std::abs(real_spherical_harmonic(3, 2, p) - 0.08850168864793405785) < 1e-14);
  CHECK(std::abs(real_spherical_harmonic(3, -2, p) - 0.51312249940459379127) < 1e-14);
}

TEST_CASE("property: addition formula on the diagonal") {
  gen::Rng rng(5);
  std::vector<double> y(harmonic_count(30));
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = gen::point(rng);
    real_spherical_harmonics(30, x, y);
    for (int l = 0; l <= 30; ++l) {
      double s = 0.0;
      for (int m = -l; m <= l; ++m) s += y[harmonic_index(l, m)] * y[harmonic_index(l, m)];
      CHECK(s == doctest::Approx((2 * l + 1) / kFourPi).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: addition formula off the diagonal") {
  gen::Rng rng(6);
  std::vector<double> a(harmonic_count(20)), b(harmonic_count(20));
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = gen::point(rng), z = gen::point(rng);
    real_spherical_harmonics(20, x, a);
    real_spherical_harmonics(20, z, b);
    for (int l = 0; l <= 20; ++l) {
      double s = 0.0;
      for (int m = -l; m <= l; ++m) s += a[harmonic_index(l, m)] * b[harmonic_index(l, m)];
      CHECK(std::abs(s - projector_kernel(l, x, z)) < 1e-12);
    }
  }
}

TEST_CASE("orthonormality by cubature") {
  const auto grid = build_grid(32, GridLayout::Product);
  const int L = 15;
  const std::size_t n = harmonic_count(L);
  std::vector<double> gram(n * n, 0.0), y(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    real_spherical_harmonics(L, grid.points[k], y);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) gram[a * n + b] += grid.weights[k] * y[a] * y[b];
    }
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) worst = std::max(worst, std::abs(gram[a * n + b] - (a == b ? 1.0 : 0.0)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("sphere points") {
  const SpherePoint p(0.5, -1.0);
  CHECK(p.phi == doctest::Approx(2.0 * kPi - 1.0));
  CHECK_THROWS(SpherePoint(-0.1, 0.0));
  const SpherePoint q = SpherePoint::from_unit(p.unit());
  CHECK(q.theta == doctest::Approx(p.theta));
  CHECK(q.phi == doctest::Approx(p.phi));
  CHECK(angular_distance(SpherePoint(0.0, 0.0), SpherePoint(kPi, 0.0)) == doctest::Approx(kPi));
  CHECK(angular_distance(SpherePoint(1.0, 0.0), SpherePoint(1.0, 1e-9)) == doctest::Approx(std::sin(1.0) * 1e-9).epsilon(1e-6));
}

}
