#pragma once

// Data-parallel inner loops shared by the needlet, covariance and GOF code.
//
// Every kernel exists as a portable scalar reference (namespace scalar) and,
// on x86-64 builds, an AVX2/FMA variant (namespace avx2). The unqualified
// entry points dispatch once per process to the best variant the CPU
// supports. The test suite checks the variants against each other.

#include <cstddef>
#include <span>
#include <string_view>

namespace flexneedlet::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best instruction set available on this CPU and compiled into the library.
Isa detected_isa();

/// Instruction set currently used by the dispatching entry points.
Isa active_isa();

/// Overrides dispatch (tests and benchmarks). Requests for an unsupported ISA
/// fall back to Scalar; returns the ISA actually selected.
Isa set_active_isa(Isa isa);

/// out[i] = sum_{l=0}^{L} coeffs[l] * P_l(t[i]), P_l the Legendre polynomial,
/// evaluated by the three-term recurrence vectorized across the points.
void legendre_series(std::span<const double> coeffs, std::span<const double> t,
                     std::span<double> out);

/// Inner product of two equal-length arrays.
double dot(std::span<const double> a, std::span<const double> b);

/// out[r] = dot(w, rows[r]) for `count` rows laid out with stride `stride`.
/// Shares each load of w across several rows.
void dot_rows(std::span<const double> w, const double* rows, std::size_t stride,
              std::size_t count, double* out);

namespace scalar {
void legendre_series(std::span<const double> coeffs, std::span<const double> t,
                     std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void dot_rows(std::span<const double> w, const double* rows, std::size_t stride,
              std::size_t count, double* out);
}  // namespace scalar

#if defined(FLEXNEEDLET_HAVE_AVX2)
namespace avx2 {
void legendre_series(std::span<const double> coeffs, std::span<const double> t,
                     std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void dot_rows(std::span<const double> w, const double* rows, std::size_t stride,
              std::size_t count, double* out);
}  // namespace avx2
#endif

}  // namespace flexneedlet::simd
