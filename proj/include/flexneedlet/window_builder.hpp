#pragma once

// Smooth windows on the multipole axis.
//
//   phi1(t) = exp(-1 / (1 - t^2))             on (-1, 1)
//   phi2(x) = int_{-1}^{x} phi1 / int_{-1}^{1} phi1
//   a_j(u)  = phi2((S_j + S_{j-1} - 2u) / (S_j - S_{j-1}))   on (S_{j-1}, S_j]
//   b_j(u)  = sqrt(a_{j+1}(u) - a_j(u))
//
// Level 0 carries the residual b_0^2 = a_1 so that sum_{j=0}^{J-1} b_j^2 = a_J,
// which equals 1 on [0, S_{J-1}].

#include <span>
#include <string>
#include <vector>

#include "flexneedlet/scale_engine.hpp"

namespace flexneedlet {

class Mollifier {
 public:
  static constexpr int kCdfOrder = 64;
  static constexpr int kNormalizationOrder = 128;

  /// Shared instance; the normalization is computed on first use.
  static const Mollifier& instance();

  double normalization() const { return normalization_; }
  double eval(double t) const;
  /// phi2(x), clamped to 0 below -1 and 1 above 1.
  double cdf(double x) const;

 private:
  Mollifier();
  double normalization_;
};

double mollifier_eval(double t);
double mollifier_cdf(double x);

enum class WindowMode { PerLevel, Template };

/// Integer multipoles first..last inclusive; empty when first > last.
struct MultipoleRange {
  int first = 1;
  int last = 0;
  bool empty() const { return first > last; }
  int count() const { return empty() ? 0 : last - first + 1; }
};

class WindowSystem {
 public:
  explicit WindowSystem(ScaleSequence scales, WindowMode mode = WindowMode::PerLevel);

  const ScaleSequence& scales() const { return scales_; }
  WindowMode mode() const { return mode_; }
  /// Highest level with a full window, J - 1.
  int last_level() const { return scales_.last_index() - 1; }

  /// a_j(u), 1 <= j <= J.
  double scaling(int j, double u) const;
  /// b_j(u), 0 <= j <= J-1; j = 0 is the residual sqrt(a_1).
  double weight(int j, double u) const;
  /// Sum of b_j(u)^2 over all levels 0..J-1.
  double partition_sum(double u) const;

  /// {l : S_{j-1} < l < S_{j+1}, b_j(l) > 0} (S_{-1} = -inf for j = 0).
  MultipoleRange support(int j) const;

  /// CSV `j,u,a_j,b_j` for levels 1..J-1 over the given abscissae.
  std::string to_csv(std::span<const double> u_grid) const;

 private:
  ScaleSequence scales_;
  WindowMode mode_;
};

/// max |b_j^(n)| over [S_{j-1}, S_{j+1}] by central differences on grid_size
/// points, multiplied by (S_j - S_{j-1})^n. n in {1, 2}, grid_size >= 256.
double derivative_bound_probe(const WindowSystem& ws, int j, int n, int grid_size = 1024);

}  // namespace flexneedlet
