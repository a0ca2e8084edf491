#include <atomic>
#include <cstdlib>
#include <string_view>

#include "flexneedlet/simd/kernels.hpp"

namespace flexneedlet::simd {

namespace {

Isa probe_cpu() {
#if defined(FLEXNEEDLET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

// FLEXNEEDLET_ISA=scalar forces the reference kernels.
Isa initial_isa() {
  const char* env = std::getenv("FLEXNEEDLET_ISA");
  if (env != nullptr && std::string_view(env) == "scalar") return Isa::Scalar;
  return probe_cpu();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa isa = probe_cpu();
  return isa;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

void legendre_series(std::span<const double> coeffs, std::span<const double> t,
                     std::span<double> out) {
#if defined(FLEXNEEDLET_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::legendre_series(coeffs, t, out);
#endif
  scalar::legendre_series(coeffs, t, out);
}

double dot(std::span<const double> a, std::span<const double> b) {
#if defined(FLEXNEEDLET_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

void dot_rows(std::span<const double> w, const double* rows, std::size_t stride,
              std::size_t count, double* out) {
#if defined(FLEXNEEDLET_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::dot_rows(w, rows, stride, count, out);
#endif
  scalar::dot_rows(w, rows, stride, count, out);
}

}  // namespace flexneedlet::simd
