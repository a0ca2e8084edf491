#pragma once

#include <cstddef>
#include <vector>

namespace flexneedlet::simd::detail {

// Coefficients of P_l = alpha_l * t * P_{l-1} - beta_l * P_{l-2}.
struct LegendreRecurrence {
  std::vector<double> alpha;
  std::vector<double> beta;

  explicit LegendreRecurrence(std::size_t lmax) : alpha(lmax + 1, 0.0), beta(lmax + 1, 0.0) {
    for (std::size_t l = 2; l <= lmax; ++l) {
      const double dl = static_cast<double>(l);
      alpha[l] = (2.0 * dl - 1.0) / dl;
      beta[l] = (dl - 1.0) / dl;
    }
  }
};

}  // namespace flexneedlet::simd::detail
