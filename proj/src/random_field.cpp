#include "flexneedlet/random_field.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "flexneedlet/csv.hpp"
#include "flexneedlet/parallel.hpp"
#include "flexneedlet/simd/kernels.hpp"

namespace flexneedlet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Squared-window covariance coefficients b_j(l)^2 C_l (2l+1)/(4 pi), l >= 1.
std::vector<double> covariance_coefficients(const NeedletSystem& sys, const SpectrumModel& model, int j) {
  const auto w = sys.window(j);
  std::vector<double> c(w.size(), 0.0);
  for (std::size_t l = 1; l < w.size(); ++l) {
    if (w[l] == 0.0) continue;
    c[l] = w[l] * w[l] * spectrum_eval(model, static_cast<int>(l)) * (2.0 * l + 1.0) / kFourPi;
  }
  return c;
}

}  // namespace

SpectrumModel SpectrumModel::unit(double alpha, double beta_smoothness) {
  SpectrumModel m;
  m.alpha = alpha;
  m.beta_smoothness = beta_smoothness;
  m.validate();
  return m;
}

SpectrumModel SpectrumModel::modulated_sine(double alpha, std::vector<SineTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("modulated_sine: at least one term is required");
  SpectrumModel m;
  m.alpha = alpha;
  m.terms = std::move(terms);
  m.beta_smoothness = 0.0;
  for (const auto& t : m.terms) m.beta_smoothness = std::max(m.beta_smoothness, t.beta);
  m.validate();
  return m;
}

void SpectrumModel::validate() const {
  if (!(alpha >= 2.0) || !std::isfinite(alpha)) throw std::invalid_argument("spectrum: alpha must be >= 2");
  if (!(beta_smoothness >= 0.0 && beta_smoothness < 1.0)) {
    throw std::invalid_argument("spectrum: beta_smoothness must lie in [0, 1)");
  }
  for (const auto& t : terms) {
    if (!(t.c > 0.0)) throw std::invalid_argument("spectrum: term c must be > 0");
    if (!(t.d > 1.0)) throw std::invalid_argument("spectrum: term d must be > 1");
    if (!(t.M > 0.0)) throw std::invalid_argument("spectrum: term M must be > 0");
    if (!(t.beta > 0.0 && t.beta < 1.0)) throw std::invalid_argument("spectrum: term beta must lie in (0, 1)");
  }
}

double SpectrumModel::modulation(double u) const {
  if (terms.empty()) return 1.0;
  double g = 0.0;
  for (const auto& t : terms) g += t.c * (t.d + std::sin(std::pow(u, t.beta) / t.M));
  return g;
}

double SpectrumModel::modulation_lower_bound() const {
  if (terms.empty()) return 1.0;
  double g = 0.0;
  for (const auto& t : terms) g += t.c * (t.d - 1.0);
  return g;
}

double SpectrumModel::modulation_upper_bound() const {
  if (terms.empty()) return 1.0;
  double g = 0.0;
  for (const auto& t : terms) g += t.c * (t.d + 1.0);
  return g;
}

std::string SpectrumModel::label() const {
  std::string s = is_unit() ? "unit" : "modulated_sine";
  s += "(alpha=" + csv::number(alpha) + ", beta=" + csv::number(beta_smoothness);
  for (const auto& t : terms) {
    s += ", [c=" + csv::number(t.c) + " d=" + csv::number(t.d) + " M=" + csv::number(t.M) +
         " beta=" + csv::number(t.beta) + "]";
  }
  return s + ")";
}

std::string SpectrumModel::to_csv(int lmax) const {
  std::string out = "l,C_l,G_l\n";
  for (int l = 1; l <= lmax; ++l) {
    csv::append_row(out, {csv::number(l), csv::number(spectrum_eval(*this, l)), csv::number(modulation(l))});
  }
  return out;
}

double spectrum_eval(const SpectrumModel& model, int l) {
  if (l < 1) throw std::invalid_argument("spectrum_eval: l must be >= 1 (the monopole is excluded)");
  return model.modulation(l) * std::pow(static_cast<double>(l), -model.alpha);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t l) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ l);
}

void simulate_degree(const SpectrumModel& model, int l, std::uint64_t seed, std::uint64_t stream,
                     std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(2 * l + 1)) throw std::invalid_argument("simulate_degree: size");
  if (l == 0) {
    out[0] = 0.0;
    return;
  }
  std::mt19937_64 rng(derive_seed(seed, stream, static_cast<std::uint64_t>(l)));
  std::normal_distribution<double> normal(0.0, std::sqrt(spectrum_eval(model, l)));
  for (double& v : out) v = normal(rng);
}

FieldSample simulate_field(const SpectrumModel& model, int lmax, std::uint64_t seed, std::uint64_t stream) {
  if (lmax < 1) throw std::invalid_argument("simulate_field: lmax must be >= 1");
  FieldSample s{BandlimitedFunction::zero(lmax), seed, stream};
  for (int l = 1; l <= lmax; ++l) {
    simulate_degree(model, l, seed, stream,
                    std::span<double>(s.field.coeffs.data() + harmonic_index(l, -l), static_cast<std::size_t>(2 * l + 1)));
  }
  return s;
}

void covariance_kernel(const NeedletSystem& sys, const SpectrumModel& model, int j,
                       std::span<const double> t, std::span<double> out) {
  const auto c = covariance_coefficients(sys, model, j);
  if (c.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  simd::legendre_series(c, t, out);
}

double coeff_covariance(const NeedletSystem& sys, const SpectrumModel& model, int j, std::size_t k,
                        std::size_t k2) {
  const auto& grid = sys.grid(j);
  if (k >= grid.size() || k2 >= grid.size()) throw std::out_of_range("coeff_covariance: point index");
  const double t[1] = {k == k2 ? 1.0 : cos_angle(grid.points[k], grid.points[k2])};
  double v[1];
  covariance_kernel(sys, model, j, t, v);
  return std::sqrt(grid.weights[k] * grid.weights[k2]) * v[0];
}

double coeff_correlation(const NeedletSystem& sys, const SpectrumModel& model, int j, std::size_t k,
                         std::size_t k2) {
  const double c = coeff_covariance(sys, model, j, k, k2);
  const double v1 = coeff_covariance(sys, model, j, k, k);
  const double v2 = coeff_covariance(sys, model, j, k2, k2);
  return c / std::sqrt(v1 * v2);
}

LevelProjector::LevelProjector(const NeedletSystem& sys, int j, std::vector<std::size_t> points)
    : points_(std::move(points)) {
  const auto& grid = sys.grid(j);
  const MultipoleRange sup = sys.support(j);
  first_ = std::max(sup.first, 1);
  last_ = sup.last;
  if (first_ > last_) throw std::domain_error("LevelProjector: level has no multipoles with l >= 1");
  width_ = harmonic_count(last_) - harmonic_index(first_, -first_);
  rows_.assign(points_.size() * width_, 0.0);
  const auto w = sys.window(j);
  const std::size_t offset = harmonic_index(first_, -first_);
  parallel_for(points_.size(), [&](std::size_t r) {
    const std::size_t k = points_[r];
    if (k >= grid.size()) throw std::out_of_range("LevelProjector: point index");
    std::vector<double> y(harmonic_count(last_));
    real_spherical_harmonics(last_, grid.points[k], y);
    const double s = std::sqrt(grid.weights[k]);
    double* row = rows_.data() + r * width_;
    for (int l = first_; l <= last_; ++l) {
      const double b = s * w[static_cast<std::size_t>(l)];
      for (int m = -l; m <= l; ++m) row[harmonic_index(l, m) - offset] = b * y[harmonic_index(l, m)];
    }
  });
}

void LevelProjector::simulate(const SpectrumModel& model, std::uint64_t seed, std::uint64_t stream,
                              std::span<double> band) const {
  if (band.size() != width_) throw std::invalid_argument("LevelProjector::simulate: band size");
  const std::size_t offset = harmonic_index(first_, -first_);
  for (int l = first_; l <= last_; ++l) {
    simulate_degree(model, l, seed, stream,
                    band.subspan(harmonic_index(l, -l) - offset, static_cast<std::size_t>(2 * l + 1)));
  }
}

void LevelProjector::apply(std::span<const double> band, std::span<double> beta) const {
  if (band.size() != width_ || beta.size() != points_.size()) {
    throw std::invalid_argument("LevelProjector::apply: size mismatch");
  }
  simd::dot_rows(band, rows_.data(), width_, points_.size(), beta.data());
}

std::vector<CovarianceEstimate> empirical_covariance(
    const NeedletSystem& sys, const SpectrumModel& model, int j,
    std::span<const std::pair<std::size_t, std::size_t>> pairs, int replicates, std::uint64_t seed) {
  if (replicates < 2) throw std::invalid_argument("empirical_covariance: need at least 2 replicates");
  std::vector<std::size_t> pts;
  for (const auto& [a, b] : pairs) {
    pts.push_back(a);
    pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const LevelProjector proj(sys, j, pts);
  const std::size_t P = pts.size();
  const std::size_t R = static_cast<std::size_t>(replicates);
  std::vector<double> beta(R * P);
  parallel_for(R, [&](std::size_t r) {
    std::vector<double> band(proj.harmonics());
    proj.simulate(model, seed, r, band);
    proj.apply(band, std::span<double>(beta.data() + r * P, P));
  });
  std::vector<double> mean(P, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t p = 0; p < P; ++p) mean[p] += beta[r * P + p];
  }
  for (double& m : mean) m /= static_cast<double>(R);
  auto column = [&](std::size_t k) {
    return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), k) - pts.begin());
  };
  std::vector<CovarianceEstimate> out;
  for (const auto& [a, b] : pairs) {
    const std::size_t ia = column(a), ib = column(b);
    double s = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double prod = (beta[r * P + ia] - mean[ia]) * (beta[r * P + ib] - mean[ib]);
      s += prod;
      ss += prod * prod;
    }
    const double n = static_cast<double>(R);
    const double cov = s / (n - 1.0);
    const double mean_prod = s / n;
    const double var_prod = std::max(ss / n - mean_prod * mean_prod, 0.0) * n / (n - 1.0);
    out.push_back({coeff_covariance(sys, model, j, a, b), cov, std::sqrt(var_prod / n)});
  }
  return out;
}

std::vector<CorrelationRow> correlation_decay_profile(
    const NeedletSystem& sys, const SpectrumModel& model, int j,
    std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  const auto& grid = sys.grid(j);
  std::vector<double> t(pairs.size());
  std::vector<CorrelationRow> rows(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [a, b] = pairs[i];
    if (a >= grid.size() || b >= grid.size()) throw std::out_of_range("correlation_decay_profile: point index");
    rows[i].theta = a == b ? 0.0 : angular_distance(grid.points[a], grid.points[b]);
    t[i] = a == b ? 1.0 : cos_angle(grid.points[a], grid.points[b]);
  }
  std::vector<double> cov(pairs.size());
  covariance_kernel(sys, model, j, t, cov);
  const double t1[1] = {1.0};
  double diag[1];
  covariance_kernel(sys, model, j, t1, diag);
  // The weights cancel in the correlation because the kernel is zonal.
  for (std::size_t i = 0; i < pairs.size(); ++i) rows[i].corr_analytic = std::abs(cov[i] / diag[0]);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const CorrelationRow& x, const CorrelationRow& y) { return x.theta < y.theta; });
  return rows;
}

std::string correlation_csv(const std::vector<CorrelationRow>& rows) {
  std::string out = "theta,corr_analytic,corr_empirical,se\n";
  for (const auto& r : rows) {
    csv::append_row(out, {csv::number(r.theta), csv::number(r.corr_analytic), csv::number(r.corr_empirical),
                          csv::number(r.se)});
  }
  return out;
}

double correlation_decay_scale(const ScaleSequence& scales, int j, double beta) {
  if (j < 1 || j > scales.last_index()) throw std::out_of_range("correlation_decay_scale: level");
  const double lower = scales.center(j - 1);
  return std::min(std::pow(lower, 1.0 - beta), scales.center(j) - lower);
}

DecayFit fit_correlation_decay(const std::vector<CorrelationRow>& rows, double scale, double lo, double hi) {
  std::vector<double> th, v;
  for (const auto& r : rows) {
    th.push_back(r.theta);
    v.push_back(r.corr_analytic);
  }
  return fit_envelope_decay(th, v, scale, lo, hi);
}

RegularityFit regularity_probe(const SpectrumModel& model, int r, double u_lo, double u_hi) {
  if (model.is_unit()) throw std::invalid_argument("regularity_probe: needs a modulated spectrum");
  if (r < 1 || r > 3) throw std::invalid_argument("regularity_probe: order must be 1, 2 or 3");
  if (!(u_lo > 0.0 && u_hi > u_lo)) throw std::invalid_argument("regularity_probe: bad range");
  // Shortest oscillation period of the modulation on the range (at u_lo).
  double period = std::numeric_limits<double>::infinity();
  for (const auto& t : model.terms) {
    period = std::min(period, 2.0 * kPi * t.M * std::pow(u_lo, 1.0 - t.beta) / t.beta);
  }
  const double h = period / 200.0;
  const double step = period / 64.0;
  auto G = [&](double u) { return model.modulation(u); };
  auto diff = [&](double u) {
    switch (r) {
      case 1: return (G(u + h) - G(u - h)) / (2.0 * h);
      case 2: return (G(u + h) - 2.0 * G(u) + G(u - h)) / (h * h);
      default: return (G(u + 2 * h) - 2.0 * G(u + h) + 2.0 * G(u - h) - G(u - 2 * h)) / (2.0 * h * h * h);
    }
  };
  const auto n = static_cast<std::size_t>(std::ceil((u_hi - u_lo) / step)) + 1;
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(diff(u_lo + static_cast<double>(i) * step));
  RegularityFit fit;
  fit.order = r;
  fit.expected = -(1.0 - model.beta_smoothness) * r;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (a[i] > a[i - 1] && a[i] >= a[i + 1]) {
      const double x = std::log(u_lo + static_cast<double>(i) * step);
      const double y = std::log(a[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++fit.peaks;
    }
  }
  if (fit.peaks < 2) throw std::domain_error("regularity_probe: fewer than two oscillation peaks in range");
  const double m = static_cast<double>(fit.peaks);
  fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

}  // namespace flexneedlet
