#include "flexneedlet/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "flexneedlet/csv.hpp"

namespace flexneedlet {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Aliasing threshold for the reduced layout, relative to O(1) harmonic values.
constexpr double kAliasTolerance = 1e-17;

std::array<double, 3> unit_of(const SpherePoint& p) { return p.unit(); }

double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  return std::atan2(std::hypot(cx, cy, cz), a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
}

// Largest |Pbar_l^m(x)| over m <= l <= L.
double column_peak(int L, int m, double x, std::vector<double>& scratch) {
  scratch.resize(static_cast<std::size_t>(L - m + 1));
  associated_legendre_column(L, m, x, scratch);
  double peak = 0.0;
  for (double v : scratch) peak = std::max(peak, std::abs(v));
  return peak;
}

// Smallest n in [1, L+1] such that orders m >= n are negligible on this ring.
// The order-m columns decay monotonically past the turning point, so the
// predicate is monotone in n and bisection applies.
int reduced_ring_count(int L, double x, std::vector<double>& scratch) {
  int lo = 1, hi = L + 1;  // hi always satisfies the predicate
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (column_peak(L, mid, x, scratch) < kAliasTolerance) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // P_n = p1, P_{n-1} = p0
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = -x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

std::string SphericalGrid::to_csv() const {
  std::string out = "k,theta,phi,lambda\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    csv::append_row(out, {csv::number(k), csv::number(points[k].theta), csv::number(points[k].phi),
                          csv::number(weights[k])});
  }
  return out;
}

SphericalGrid build_grid(int L, GridLayout layout) {
  if (L < 0) throw std::invalid_argument("build_grid: bandlimit must be >= 0");
  SphericalGrid grid;
  grid.bandlimit = L;
  grid.layout = layout;
  const int n_theta = (L + 2) / 2;  // ceil((L + 1) / 2)
  const GaussLegendreRule rule = gauss_legendre(n_theta);
  std::vector<double> scratch;
  grid.rings.reserve(static_cast<std::size_t>(n_theta));
  for (int i = 0; i < n_theta; ++i) {
    GridRing ring;
    ring.x = rule.nodes[static_cast<std::size_t>(i)];
    ring.theta = std::acos(std::clamp(ring.x, -1.0, 1.0));
    ring.count = layout == GridLayout::Product ? L + 1 : reduced_ring_count(L, ring.x, scratch);
    const double step = kTwoPi / ring.count;
    ring.phase = layout == GridLayout::Reduced && i % 2 == 1 ? 0.5 * step : 0.0;
    ring.weight = rule.weights[static_cast<std::size_t>(i)] * step;
    ring.first = grid.points.size();
    for (int k = 0; k < ring.count; ++k) {
      grid.points.emplace_back(ring.theta, ring.phase + k * step);
      grid.weights.push_back(ring.weight);
    }
    grid.rings.push_back(ring);
  }
  return grid;
}

int level_bandlimit(const ScaleSequence& scales, int j) {
  if (j < 1 || j > scales.last_index() - 1) {
    throw std::out_of_range("level_bandlimit: level outside [1, J-1]");
  }
  const double s = std::ceil(scales.center(j + 1));
  if (!(s < 1e8)) throw std::range_error("level_bandlimit: bandlimit not representable");
  return 2 * static_cast<int>(s);
}

SphericalGrid grid_for_level(const ScaleSequence& scales, int j, GridLayout layout) {
  SphericalGrid grid = build_grid(level_bandlimit(scales, j), layout);
  grid.level = j;
  return grid;
}

double min_separation(const SphericalGrid& grid) {
  if (grid.size() < 2) throw std::invalid_argument("min_separation: need at least two points");
  if (grid.rings.empty()) {
    std::vector<std::size_t> all(grid.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return min_separation(grid, all);
  }
  // Ring structure: within a ring the nearest pair is two consecutive
  // longitudes; across rings only the two longitudes bracketing a point can
  // be nearest, and ring pairs further apart in theta than the current best
  // are skipped.
  double best = kPi;
  for (const GridRing& r : grid.rings) {
    if (r.count >= 2) best = std::min(best, angular_distance(grid.points[r.first], grid.points[r.first + 1]));
  }
  for (std::size_t a = 0; a < grid.rings.size(); ++a) {
    const GridRing& ra = grid.rings[a];
    for (std::size_t b = a + 1; b < grid.rings.size(); ++b) {
      const GridRing& rb = grid.rings[b];
      if (rb.theta - ra.theta >= best) break;
      const double step = kTwoPi / rb.count;
      for (int k = 0; k < ra.count; ++k) {
        const auto ua = unit_of(grid.points[ra.first + static_cast<std::size_t>(k)]);
        const double rel = (grid.points[ra.first + static_cast<std::size_t>(k)].phi - rb.phase) / step;
        const long base = static_cast<long>(std::floor(rel));
        for (long c = base; c <= base + 1; ++c) {
          const long idx = ((c % rb.count) + rb.count) % rb.count;
          best = std::min(best, distance(ua, unit_of(grid.points[rb.first + static_cast<std::size_t>(idx)])));
        }
      }
    }
  }
  return best;
}

double min_separation(const SphericalGrid& grid, std::span<const std::size_t> subset) {
  if (subset.size() < 2) throw std::invalid_argument("min_separation: need at least two points");
  std::vector<std::size_t> order(subset.begin(), subset.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = grid.points[a];
    const auto& pb = grid.points[b];
    return pa.theta < pb.theta || (pa.theta == pb.theta && pa.phi < pb.phi);
  });
  std::vector<std::array<double, 3>> u(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) u[i] = unit_of(grid.points[order[i]]);
  // Neighbours in (theta, phi) order give an upper bound close to the answer;
  // every closer pair then shares or touches a cell of that chord length.
  double bound = kPi;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) bound = std::min(bound, distance(u[i], u[i + 1]));
  if (!(bound > 0.0)) return 0.0;
  const double cell = 2.0 * std::sin(0.5 * bound);
  struct KeyHash {
    std::size_t operator()(const std::array<long, 3>& k) const {
      return static_cast<std::size_t>(k[0] * 73856093L ^ k[1] * 19349663L ^ k[2] * 83492791L);
    }
  };
  std::unordered_map<std::array<long, 3>, std::vector<std::size_t>, KeyHash> cells;
  auto key_of = [&](const std::array<double, 3>& v) {
    return std::array<long, 3>{static_cast<long>(std::floor(v[0] / cell)), static_cast<long>(std::floor(v[1] / cell)),
                               static_cast<long>(std::floor(v[2] / cell))};
  };
  for (std::size_t i = 0; i < u.size(); ++i) cells[key_of(u[i])].push_back(i);
  double best = bound;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto k = key_of(u[i]);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          const auto it = cells.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == cells.end()) continue;
          for (std::size_t other : it->second) {
            if (other > i) best = std::min(best, distance(u[i], u[other]));
          }
        }
      }
    }
  }
  return best;
}

std::vector<std::size_t> subsample_separated(const SphericalGrid& grid, double min_dist,
                                             std::uint64_t seed) {
  if (grid.size() == 0) return {};
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!(min_dist > 0.0)) return order;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  if (min_dist >= kPi) return {order.front()};

  // Accepted points bucketed by theta band; a conflicting point must lie in an
  // adjacent band because great-circle distance bounds |delta theta|.
  std::unordered_map<long, std::vector<std::size_t>> bands;
  std::vector<std::array<double, 3>> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) u[i] = unit_of(grid.points[i]);
  std::vector<std::size_t> accepted;
  for (std::size_t idx : order) {
    const long band = static_cast<long>(std::floor(grid.points[idx].theta / min_dist));
    bool ok = true;
    for (long b = band - 1; b <= band + 1 && ok; ++b) {
      const auto it = bands.find(b);
      if (it == bands.end()) continue;
      for (std::size_t other : it->second) {
        if (distance(u[idx], u[other]) < min_dist) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      bands[band].push_back(idx);
      accepted.push_back(idx);
    }
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

}  // namespace flexneedlet
