#pragma once

// Spherical cubature rules: Gauss-Legendre nodes in cos(theta) with
// equiangular longitudes on each ring.
//
// The default Reduced layout shrinks the ring size toward the poles. A ring at
// x = cos(theta) only needs enough longitudes to avoid aliasing the orders m
// for which Pbar_l^m(x), l <= L, is numerically nonzero; beyond the turning
// point m ~ L sin(theta) these decay faster than exponentially. Exactness for
// degree <= L is kept to round-off, and point spacing stays ~ 1/L everywhere
// instead of collapsing to ~ 1/L^2 at the poles as in the Product layout.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexneedlet/scale_engine.hpp"
#include "flexneedlet/sphere_harmonics.hpp"

namespace flexneedlet {

struct GaussLegendreRule {
  std::vector<double> nodes;    // descending in [-1, 1], so theta ascends
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
GaussLegendreRule gauss_legendre(int n);

/// Integral of f over [a, b] with an n-point rule.
template <class F>
double integrate_gauss_legendre(const GaussLegendreRule& rule, double a, double b, F&& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

enum class GridLayout { Reduced, Product };

struct GridRing {
  std::size_t first = 0;  // index of the ring's first point
  int count = 0;          // equiangular longitudes n_phi
  double x = 0.0;         // cos(theta)
  double theta = 0.0;
  double phase = 0.0;     // longitude of the first point
  double weight = 0.0;    // lambda of every point on the ring
};

struct SphericalGrid {
  int bandlimit = 0;
  GridLayout layout = GridLayout::Reduced;
  std::vector<SpherePoint> points;
  std::vector<double> weights;
  std::vector<GridRing> rings;
  std::optional<int> level;

  std::size_t size() const { return points.size(); }
  /// CSV with header `k,theta,phi,lambda`.
  std::string to_csv() const;
};

/// Grid exact for spherical polynomials of degree <= L.
SphericalGrid build_grid(int L, GridLayout layout = GridLayout::Reduced);

/// Bandlimit 2 ceil(S_{j+1}) used for level j.
int level_bandlimit(const ScaleSequence& scales, int j);

/// build_grid(level_bandlimit(scales, j)) tagged with j; 1 <= j <= J-1.
SphericalGrid grid_for_level(const ScaleSequence& scales, int j,
                             GridLayout layout = GridLayout::Reduced);

/// Smallest pairwise great-circle distance. Requires at least two points.
double min_separation(const SphericalGrid& grid);

/// Smallest pairwise distance within a subset of grid points (size >= 2).
double min_separation(const SphericalGrid& grid, std::span<const std::size_t> subset);

/// Greedy packing in a seeded random order: a point is accepted when it lies
/// at least min_dist from every accepted point. Indices are returned sorted.
std::vector<std::size_t> subsample_separated(const SphericalGrid& grid, double min_dist,
                                             std::uint64_t seed);

}  // namespace flexneedlet
