#include "flexneedlet/sphere_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flexneedlet {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double clamp_argument(double t) {
  if (!(std::abs(t) <= 1.0 + 1e-12)) {
    throw std::domain_error("legendre: argument outside [-1, 1]");
  }
  return std::clamp(t, -1.0, 1.0);
}

}  // namespace

SpherePoint::SpherePoint(double theta_, double phi_) : theta(theta_), phi(phi_) {
  if (!(theta >= 0.0 && theta <= kPi)) throw std::domain_error("SpherePoint: theta outside [0, pi]");
  if (!std::isfinite(phi)) throw std::domain_error("SpherePoint: phi must be finite");
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
}

std::array<double, 3> SpherePoint::unit() const {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

SpherePoint SpherePoint::from_unit(const std::array<double, 3>& v) {
  const double r = std::hypot(v[0], v[1], v[2]);
  if (!(r > 0.0)) throw std::domain_error("SpherePoint::from_unit: zero vector");
  const double theta = std::atan2(std::hypot(v[0], v[1]), v[2]);
  return SpherePoint(std::clamp(theta, 0.0, kPi), std::atan2(v[1], v[0]));
}

double angular_distance(const SpherePoint& x, const SpherePoint& y) {
  const auto a = x.unit();
  const auto b = y.unit();
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  const double d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::atan2(std::hypot(cx, cy, cz), d);
}

double cos_angle(const SpherePoint& x, const SpherePoint& y) {
  const auto a = x.unit();
  const auto b = y.unit();
  return std::clamp(a[0] * b[0] + a[1] * b[1] + a[2] * b[2], -1.0, 1.0);
}

double legendre(int l, double t) {
  if (l < 0) throw std::invalid_argument("legendre: degree must be >= 0");
  t = clamp_argument(t);
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void legendre_table(int lmax, double t, std::span<double> out) {
  if (lmax < 0) throw std::invalid_argument("legendre_table: lmax must be >= 0");
  if (out.size() != static_cast<std::size_t>(lmax) + 1) {
    throw std::invalid_argument("legendre_table: output size must be lmax + 1");
  }
  t = clamp_argument(t);
  out[0] = 1.0;
  if (lmax >= 1) out[1] = t;
  for (int k = 2; k <= lmax; ++k) {
    out[static_cast<std::size_t>(k)] =
        ((2.0 * k - 1.0) * t * out[static_cast<std::size_t>(k - 1)] -
         (k - 1.0) * out[static_cast<std::size_t>(k - 2)]) / k;
  }
}

double projector_kernel(int l, const SpherePoint& x, const SpherePoint& y) {
  if (l < 0) throw std::invalid_argument("projector_kernel: degree must be >= 0");
  return (2.0 * l + 1.0) / kFourPi * legendre(l, cos_angle(x, y));
}

void associated_legendre_column(int lmax, int m, double x, std::span<double> out) {
  if (m < 0 || m > lmax) throw std::invalid_argument("associated_legendre_column: need 0 <= m <= lmax");
  if (out.size() != static_cast<std::size_t>(lmax - m + 1)) {
    throw std::invalid_argument("associated_legendre_column: output size must be lmax - m + 1");
  }
  x = clamp_argument(x);
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  // Pbar_m^m = sqrt(1/4pi) prod_k sqrt((2k+1)/2k) s^m, carried as a log so that
  // high orders near the poles do not underflow before the recurrence in l
  // brings the values back into range.
  double log_pmm = -0.5 * std::log(kFourPi);
  if (m > 0) {
    if (s == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double log_s = std::log(s);
    for (int k = 1; k <= m; ++k) log_pmm += 0.5 * std::log((2.0 * k + 1.0) / (2.0 * k)) + log_s;
  }
  constexpr double kBig = 1e200;
  const double kLogBig = std::log(kBig);
  double scale = log_pmm;  // true value = carried value * exp(scale)
  double p0 = 1.0;
  out[0] = std::exp(scale);
  if (lmax == m) return;
  double p1 = std::sqrt(2.0 * m + 3.0) * x * p0;
  out[1] = p1 * std::exp(scale);
  const double mm = static_cast<double>(m) * m;
  for (int l = m + 2; l <= lmax; ++l) {
    const double dl = l;
    const double a = std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - mm));
    const double b = std::sqrt(((dl - 1.0) * (dl - 1.0) - mm) / (4.0 * (dl - 1.0) * (dl - 1.0) - 1.0));
    double p2 = a * (x * p1 - b * p0);
    if (std::abs(p2) > kBig) {
      p0 /= kBig;
      p1 /= kBig;
      p2 /= kBig;
      scale += kLogBig;
    }
    out[static_cast<std::size_t>(l - m)] = scale < -745.0 ? 0.0 : p2 * std::exp(scale);
    p0 = p1;
    p1 = p2;
  }
}

AssociatedLegendreTable::AssociatedLegendreTable(int lmax, double x) : lmax_(lmax) {
  if (lmax < 0) throw std::invalid_argument("AssociatedLegendreTable: lmax must be >= 0");
  values_.resize(offset(lmax) + 1);
  for (int m = 0; m <= lmax; ++m) {
    associated_legendre_column(lmax, m, x,
                               std::span<double>(values_.data() + offset(m),
                                                 static_cast<std::size_t>(lmax - m + 1)));
  }
}

double real_spherical_harmonic(int l, int m, const SpherePoint& x) {
  if (l < 0) throw std::invalid_argument("real_spherical_harmonic: degree must be >= 0");
  if (std::abs(m) > l) throw std::invalid_argument("real_spherical_harmonic: |m| must be <= l");
  const int am = std::abs(m);
  std::vector<double> col(static_cast<std::size_t>(l - am + 1));
  associated_legendre_column(l, am, std::cos(x.theta), col);
  const double p = col.back();
  if (m == 0) return p;
  const double s2 = std::sqrt(2.0);
  return m > 0 ? s2 * p * std::cos(am * x.phi) : s2 * p * std::sin(am * x.phi);
}

void real_spherical_harmonics(int lmax, const SpherePoint& x, std::span<double> out) {
  if (out.size() != harmonic_count(lmax)) {
    throw std::invalid_argument("real_spherical_harmonics: output size must be (lmax+1)^2");
  }
  const AssociatedLegendreTable table(lmax, std::cos(x.theta));
  const double s2 = std::sqrt(2.0);
  for (int m = 0; m <= lmax; ++m) {
    const double c = std::cos(m * x.phi);
    const double s = std::sin(m * x.phi);
    for (int l = m; l <= lmax; ++l) {
      const double p = table(l, m);
      if (m == 0) {
        out[harmonic_index(l, 0)] = p;
      } else {
        out[harmonic_index(l, m)] = s2 * p * c;
        out[harmonic_index(l, -m)] = s2 * p * s;
      }
    }
  }
}

}  // namespace flexneedlet
