#pragma once

// Legendre polynomials, the harmonic projector kernel Z_l and the real
// orthonormal spherical harmonics Y_lm on the unit sphere.
//
// Real harmonics use the orthonormalized associated Legendre functions
// without the Condon-Shortley phase:
//   Y_l0  = Pbar_l^0(cos theta)
//   Y_lm  = sqrt(2) Pbar_l^m(cos theta) cos(m phi),   m > 0
//   Y_l-m = sqrt(2) Pbar_l^m(cos theta) sin(m phi),   m > 0
// with Pbar normalized so that each Y has unit L^2 norm on the sphere.
// Coefficient arrays are indexed by harmonic_index(l, m) = l^2 + l + m.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace flexneedlet {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

struct SpherePoint {
  double theta = 0.0;  // colatitude in [0, pi]
  double phi = 0.0;    // longitude in [0, 2 pi)

  SpherePoint() = default;
  /// Normalizes phi into [0, 2 pi); throws if theta is outside [0, pi].
  SpherePoint(double theta_, double phi_);

  std::array<double, 3> unit() const;
  static SpherePoint from_unit(const std::array<double, 3>& v);
};

/// Great-circle distance, accurate for both tiny and near-antipodal pairs.
double angular_distance(const SpherePoint& x, const SpherePoint& y);

/// <x, y> clamped to [-1, 1].
double cos_angle(const SpherePoint& x, const SpherePoint& y);

/// P_l(t) by the three-term recurrence. |t| may exceed 1 by at most 1e-12
/// (clamped); larger values throw.
double legendre(int l, double t);

/// P_0(t) .. P_lmax(t) into out (size lmax + 1).
void legendre_table(int lmax, double t, std::span<double> out);

/// Z_l(x, y) = (2l + 1)/(4 pi) P_l(<x, y>).
double projector_kernel(int l, const SpherePoint& x, const SpherePoint& y);

constexpr std::size_t harmonic_index(int l, int m) {
  return static_cast<std::size_t>(l * l + l + m);
}
constexpr std::size_t harmonic_count(int lmax) {
  return static_cast<std::size_t>((lmax + 1) * (lmax + 1));
}

/// Orthonormalized associated Legendre functions Pbar_l^m(x), 0 <= m <= l <= lmax,
/// for a single argument, stored row by row in m.
class AssociatedLegendreTable {
 public:
  AssociatedLegendreTable(int lmax, double x);

  int lmax() const { return lmax_; }
  double operator()(int l, int m) const { return values_[offset(m) + static_cast<std::size_t>(l - m)]; }
  /// Pbar_m^m .. Pbar_lmax^m, contiguous.
  std::span<const double> column(int m) const {
    return {values_.data() + offset(m), static_cast<std::size_t>(lmax_ - m + 1)};
  }

 private:
  std::size_t offset(int m) const {
    // sum_{k<m} (lmax - k + 1)
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(lmax_ + 1) -
           static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2;
  }
  int lmax_;
  std::vector<double> values_;
};

/// Pbar_l^m(x) for l = m..lmax into out (size lmax - m + 1); one column of the table.
void associated_legendre_column(int lmax, int m, double x, std::span<double> out);

/// Y_lm(x) for a single (l, m).
double real_spherical_harmonic(int l, int m, const SpherePoint& x);

/// All Y_lm(x), l <= lmax, into out (size harmonic_count(lmax)).
void real_spherical_harmonics(int lmax, const SpherePoint& x, std::span<double> out);

}  // namespace flexneedlet
