// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <stdexcept>

#include "flexneedlet/simd/kernels.hpp"
#include "recurrence.hpp"

namespace flexneedlet::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void legendre_series(std::span<const double> coeffs, std::span<const double> t,
                     std::span<double> out) {
  if (out.size() != t.size()) throw std::invalid_argument("legendre_series: size mismatch");
  if (coeffs.size() < 2) {
    scalar::legendre_series(coeffs, t, out);
    return;
  }
  const std::size_t lmax = coeffs.size() - 1;
  const detail::LegendreRecurrence rec(lmax);
  const std::size_t n = t.size();
  std::size_t i = 0;
  // Two independent 4-lane chains per iteration hide the recurrence latency.
  for (; i + 8 <= n; i += 8) {
    const __m256d xa = _mm256_loadu_pd(t.data() + i);
    const __m256d xb = _mm256_loadu_pd(t.data() + i + 4);
    const __m256d c0 = _mm256_set1_pd(coeffs[0]);
    const __m256d c1 = _mm256_set1_pd(coeffs[1]);
    __m256d p0a = _mm256_set1_pd(1.0), p0b = p0a;
    __m256d p1a = xa, p1b = xb;
    __m256d acca = _mm256_fmadd_pd(c1, p1a, c0);
    __m256d accb = _mm256_fmadd_pd(c1, p1b, c0);
    for (std::size_t l = 2; l <= lmax; ++l) {
      const __m256d al = _mm256_set1_pd(rec.alpha[l]);
      const __m256d bl = _mm256_set1_pd(rec.beta[l]);
      const __m256d cl = _mm256_set1_pd(coeffs[l]);
      const __m256d p2a = _mm256_fmsub_pd(_mm256_mul_pd(al, xa), p1a, _mm256_mul_pd(bl, p0a));
      const __m256d p2b = _mm256_fmsub_pd(_mm256_mul_pd(al, xb), p1b, _mm256_mul_pd(bl, p0b));
      acca = _mm256_fmadd_pd(cl, p2a, acca);
      accb = _mm256_fmadd_pd(cl, p2b, accb);
      p0a = p1a;
      p1a = p2a;
      p0b = p1b;
      p1b = p2b;
    }
    _mm256_storeu_pd(out.data() + i, acca);
    _mm256_storeu_pd(out.data() + i + 4, accb);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(t.data() + i);
    __m256d p0 = _mm256_set1_pd(1.0);
    __m256d p1 = x;
    __m256d acc = _mm256_fmadd_pd(_mm256_set1_pd(coeffs[1]), p1, _mm256_set1_pd(coeffs[0]));
    for (std::size_t l = 2; l <= lmax; ++l) {
      const __m256d p2 = _mm256_fmsub_pd(_mm256_mul_pd(_mm256_set1_pd(rec.alpha[l]), x), p1,
                                         _mm256_mul_pd(_mm256_set1_pd(rec.beta[l]), p0));
      acc = _mm256_fmadd_pd(_mm256_set1_pd(coeffs[l]), p2, acc);
      p0 = p1;
      p1 = p2;
    }
    _mm256_storeu_pd(out.data() + i, acc);
  }
  if (i < n) scalar::legendre_series(coeffs, t.subspan(i), out.subspan(i));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  const std::size_t n = a.size();
  __m256d s0 = _mm256_setzero_pd(), s1 = s0, s2 = s0, s3 = s0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 8), _mm256_loadu_pd(b.data() + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 12), _mm256_loadu_pd(b.data() + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), s0);
  }
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void dot_rows(std::span<const double> w, const double* rows, std::size_t stride,
              std::size_t count, double* out) {
  const std::size_t n = w.size();
  std::size_t r = 0;
  for (; r + 4 <= count; r += 4) {
    const double* r0 = rows + r * stride;
    const double* r1 = r0 + stride;
    const double* r2 = r1 + stride;
    const double* r3 = r2 + stride;
    __m256d s0 = _mm256_setzero_pd(), s1 = s0, s2 = s0, s3 = s0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d wv = _mm256_loadu_pd(w.data() + i);
      s0 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(r0 + i), s0);
      s1 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(r1 + i), s1);
      s2 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(r2 + i), s2);
      s3 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(r3 + i), s3);
    }
    double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
    for (; i < n; ++i) {
      t0 += w[i] * r0[i];
      t1 += w[i] * r1[i];
      t2 += w[i] * r2[i];
      t3 += w[i] * r3[i];
    }
    out[r] = t0;
    out[r + 1] = t1;
    out[r + 2] = t2;
    out[r + 3] = t3;
  }
  for (; r < count; ++r) out[r] = dot(w, std::span<const double>(rows + r * stride, n));
}

}  // namespace flexneedlet::simd::avx2
