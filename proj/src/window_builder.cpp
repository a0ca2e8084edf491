#include "flexneedlet/window_builder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flexneedlet/csv.hpp"
#include "flexneedlet/cubature.hpp"

namespace flexneedlet {

namespace {

const GaussLegendreRule& cdf_rule() {
  static const GaussLegendreRule rule = gauss_legendre(Mollifier::kCdfOrder);
  return rule;
}

double phi1(double t) {
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

}  // namespace

Mollifier::Mollifier() {
  const GaussLegendreRule rule = gauss_legendre(kNormalizationOrder);
  normalization_ = integrate_gauss_legendre(rule, -1.0, 1.0, phi1);
}

const Mollifier& Mollifier::instance() {
  static const Mollifier m;
  return m;
}

double Mollifier::eval(double t) const { return phi1(t); }

double Mollifier::cdf(double x) const {
  if (!(x > -1.0)) return 0.0;
  if (x >= 1.0) return 1.0;
  // Integrate over the shorter side so the result keeps full relative accuracy
  // in both tails.
  if (x <= 0.0) return integrate_gauss_legendre(cdf_rule(), -1.0, x, phi1) / normalization_;
  return 1.0 - integrate_gauss_legendre(cdf_rule(), x, 1.0, phi1) / normalization_;
}

double mollifier_eval(double t) { return Mollifier::instance().eval(t); }
double mollifier_cdf(double x) { return Mollifier::instance().cdf(x); }

WindowSystem::WindowSystem(ScaleSequence scales, WindowMode mode)
    : scales_(std::move(scales)), mode_(mode) {
  if (scales_.last_index() < 2) throw std::invalid_argument("WindowSystem: need J >= 2");
}

double WindowSystem::scaling(int j, double u) const {
  if (j < 1 || j > scales_.last_index()) throw std::out_of_range("scaling: level outside [1, J]");
  const double lo = scales_.center(j - 1);
  const double hi = scales_.center(j);
  if (u <= lo) return 1.0;
  if (u >= hi) return 0.0;
  const Mollifier& m = Mollifier::instance();
  if (mode_ == WindowMode::Template) {
    const double tau = (2.0 * u - hi - lo) / (hi - lo);
    return m.cdf(-tau);
  }
  return m.cdf((hi + lo - 2.0 * u) / (hi - lo));
}

double WindowSystem::weight(int j, double u) const {
  if (j < 0 || j > last_level()) throw std::out_of_range("weight: level outside [0, J-1]");
  if (j == 0) return std::sqrt(scaling(1, u));
  return std::sqrt(std::max(scaling(j + 1, u) - scaling(j, u), 0.0));
}

double WindowSystem::partition_sum(double u) const {
  double sum = 0.0;
  for (int j = 0; j <= last_level(); ++j) {
    const double b = weight(j, u);
    sum += b * b;
  }
  return sum;
}

MultipoleRange WindowSystem::support(int j) const {
  if (j < 0 || j > last_level()) throw std::out_of_range("support: level outside [0, J-1]");
  const double hi = scales_.center(j + 1);
  int first = 0;
  if (j > 0) first = static_cast<int>(std::floor(scales_.center(j - 1))) + 1;
  int last = static_cast<int>(std::ceil(hi)) - 1;
  while (first <= last && weight(j, first) <= 0.0) ++first;
  while (last >= first && weight(j, last) <= 0.0) --last;
  return {first, last};
}

std::string WindowSystem::to_csv(std::span<const double> u_grid) const {
  std::string out = "j,u,a_j,b_j\n";
  for (int j = 1; j <= last_level(); ++j) {
    for (double u : u_grid) {
      csv::append_row(out, {csv::number(j), csv::number(u), csv::number(scaling(j, u)),
                            csv::number(weight(j, u))});
    }
  }
  return out;
}

double derivative_bound_probe(const WindowSystem& ws, int j, int n, int grid_size) {
  if (n != 1 && n != 2) throw std::invalid_argument("derivative_bound_probe: n must be 1 or 2");
  if (grid_size < 256) throw std::invalid_argument("derivative_bound_probe: grid_size must be >= 256");
  if (j < 1 || j > ws.last_level()) throw std::out_of_range("derivative_bound_probe: level outside [1, J-1]");
  const auto& s = ws.scales();
  const double lo = s.center(j - 1);
  const double hi = s.center(j + 1);
  const double h = (hi - lo) / (grid_size - 1);
  double peak = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double u = lo + i * h;
    const double bm = ws.weight(j, u - h);
    const double bp = ws.weight(j, u + h);
    const double d = n == 1 ? (bp - bm) / (2.0 * h) : (bp - 2.0 * ws.weight(j, u) + bm) / (h * h);
    peak = std::max(peak, std::abs(d));
  }
  return peak * std::pow(s.center(j) - s.center(j - 1), n);
}

}  // namespace flexneedlet
