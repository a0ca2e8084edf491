#include "flexneedlet/simd/kernels.hpp"

#include <stdexcept>

#include "recurrence.hpp"

namespace flexneedlet::simd::scalar {

void legendre_series(std::span<const double> coeffs, std::span<const double> t,
                     std::span<double> out) {
  if (out.size() != t.size()) throw std::invalid_argument("legendre_series: size mismatch");
  if (coeffs.empty()) {
    for (double& o : out) o = 0.0;
    return;
  }
  const std::size_t lmax = coeffs.size() - 1;
  const detail::LegendreRecurrence rec(lmax);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t[i];
    double acc = coeffs[0];
    if (lmax >= 1) {
      double p0 = 1.0;
      double p1 = x;
      acc += coeffs[1] * p1;
      for (std::size_t l = 2; l <= lmax; ++l) {
        const double p2 = rec.alpha[l] * x * p1 - rec.beta[l] * p0;
        acc += coeffs[l] * p2;
        p0 = p1;
        p1 = p2;
      }
    }
    out[i] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void dot_rows(std::span<const double> w, const double* rows, std::size_t stride,
              std::size_t count, double* out) {
  for (std::size_t r = 0; r < count; ++r) {
    out[r] = dot(w, std::span<const double>(rows + r * stride, w.size()));
  }
}

}  // namespace flexneedlet::simd::scalar
