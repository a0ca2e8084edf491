#include "flexneedlet/needlet_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flexneedlet/csv.hpp"
#include "flexneedlet/parallel.hpp"
#include "flexneedlet/simd/kernels.hpp"

namespace flexneedlet {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kCoverageTolerance = 1e-14;

void check_level(const NeedletSystem& sys, int j) {
  if (j < 0 || j > sys.last_level()) throw std::out_of_range("needlet level outside [0, J-1]");
}

// Zonal series coefficients c_l = scale * w_l (2l+1)/(4 pi), l = 0..w.size()-1.
std::vector<double> zonal_coefficients(std::span<const double> w, double scale) {
  std::vector<double> c(w.size());
  for (std::size_t l = 0; l < w.size(); ++l) c[l] = scale * w[l] * (2.0 * l + 1.0) / kFourPi;
  return c;
}

// Evaluates g = sum_{l=first}^{top} sum_m g_lm Y_lm on every point of one ring.
void ring_synthesis(const BandlimitedFunction& g, int first, int top, const GridRing& ring,
                    std::span<double> out) {
  const AssociatedLegendreTable table(top, ring.x);
  std::vector<double> cos_part(static_cast<std::size_t>(top) + 1, 0.0);
  std::vector<double> sin_part(static_cast<std::size_t>(top) + 1, 0.0);
  for (int m = 0; m <= top; ++m) {
    double a = 0.0, b = 0.0;
    for (int l = std::max(first, m); l <= top; ++l) {
      const double p = table(l, m);
      a += g.coefficient(l, m) * p;
      if (m > 0) b += g.coefficient(l, -m) * p;
    }
    cos_part[static_cast<std::size_t>(m)] = a;
    sin_part[static_cast<std::size_t>(m)] = b;
  }
  const double step = 2.0 * kPi / ring.count;
  for (int k = 0; k < ring.count; ++k) {
    const double phi = ring.phase + k * step;
    const double c1 = std::cos(phi), s1 = std::sin(phi);
    double c = 1.0, s = 0.0;
    double v = cos_part[0];
    for (int m = 1; m <= top; ++m) {
      const double cn = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = cn;
      v += kSqrt2 * (cos_part[static_cast<std::size_t>(m)] * c + sin_part[static_cast<std::size_t>(m)] * s);
    }
    out[static_cast<std::size_t>(k)] = v;
  }
}

}  // namespace

BandlimitedFunction BandlimitedFunction::zero(int lmax) {
  if (lmax < 0) throw std::invalid_argument("BandlimitedFunction: lmax must be >= 0");
  BandlimitedFunction f;
  f.lmax = lmax;
  f.coeffs.assign(harmonic_count(lmax), 0.0);
  return f;
}

BandlimitedFunction BandlimitedFunction::single(int lmax, int l, int m) {
  if (l < 0 || l > lmax || std::abs(m) > l) throw std::invalid_argument("BandlimitedFunction::single: bad (l, m)");
  BandlimitedFunction f = zero(lmax);
  f.coefficient(l, m) = 1.0;
  return f;
}

double BandlimitedFunction::norm_squared() const {
  return simd::dot(coeffs, coeffs);
}

double BandlimitedFunction::degree_energy(int l) const {
  const std::span<const double> row(coeffs.data() + harmonic_index(l, -l), static_cast<std::size_t>(2 * l + 1));
  return simd::dot(row, row);
}

double BandlimitedFunction::eval(const SpherePoint& x) const {
  std::vector<double> y(harmonic_count(lmax));
  real_spherical_harmonics(lmax, x, y);
  return simd::dot(coeffs, y);
}

double NeedletCoefficients::energy() const {
  double sum = 0.0;
  for (const auto& level : beta) sum += simd::dot(level, level);
  return sum;
}

NeedletSystem::NeedletSystem(WindowSystem windows, GridLayout layout)
    : windows_(std::move(windows)), layout_(layout) {
  for (int j = 0; j <= last_level(); ++j) {
    auto level = std::make_unique<Level>();
    level->support = windows_.support(j);
    const int top = level->support.empty() ? -1 : level->support.last;
    level->b.assign(static_cast<std::size_t>(top + 1), 0.0);
    for (int l = level->support.first; l <= top; ++l) {
      level->b[static_cast<std::size_t>(l)] = windows_.weight(j, l);
    }
    levels_.push_back(std::move(level));
  }
}

const SphericalGrid& NeedletSystem::grid(int j) const {
  check_level(*this, j);
  Level& level = *levels_[static_cast<std::size_t>(j)];
  std::call_once(level.once, [&] {
    const int L = 2 * static_cast<int>(std::ceil(scales().center(j + 1)));
    level.grid = std::make_unique<SphericalGrid>(build_grid(L, layout_));
    level.grid->level = j;
  });
  return *level.grid;
}

int NeedletSystem::max_multipole() const {
  int top = 0;
  for (int j = 0; j <= last_level(); ++j) {
    if (!support(j).empty()) top = std::max(top, support(j).last);
  }
  return top;
}

double NeedletSystem::coverage(int l) const {
  double sum = 0.0;
  for (int j = 0; j <= last_level(); ++j) {
    const auto w = window(j);
    if (l >= 0 && static_cast<std::size_t>(l) < w.size()) sum += w[static_cast<std::size_t>(l)] * w[static_cast<std::size_t>(l)];
  }
  return sum;
}

int NeedletSystem::covered_lmax() const {
  int l = 0;
  while (l <= max_multipole() && std::abs(coverage(l) - 1.0) < kCoverageTolerance) ++l;
  return l - 1;
}

double NeedletSystem::uncovered_energy(const BandlimitedFunction& f) const {
  double sum = 0.0;
  for (int l = 0; l <= f.lmax; ++l) {
    const double missing = std::max(1.0 - coverage(l), 0.0);
    if (missing > kCoverageTolerance) sum += missing * f.degree_energy(l);
  }
  return sum;
}

double kernel_eval(const NeedletSystem& sys, int j, const SpherePoint& x, const SpherePoint& y) {
  check_level(sys, j);
  const auto w = sys.window(j);
  if (w.empty()) return 0.0;
  std::vector<double> sq(w.size());
  for (std::size_t l = 0; l < w.size(); ++l) sq[l] = w[l] * w[l];
  const auto c = zonal_coefficients(sq, 1.0);
  const double t[1] = {cos_angle(x, y)};
  double out[1];
  simd::legendre_series(c, t, out);
  return out[0];
}

void needlet_profile(const NeedletSystem& sys, int j, double lambda, std::span<const double> t,
                     std::span<double> out) {
  check_level(sys, j);
  if (out.size() != t.size()) throw std::invalid_argument("needlet_profile: size mismatch");
  const auto w = sys.window(j);
  if (w.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const auto c = zonal_coefficients(w, std::sqrt(lambda));
  simd::legendre_series(c, t, out);
}

double needlet_eval(const NeedletSystem& sys, int j, std::size_t k, const SpherePoint& x) {
  const auto& grid = sys.grid(j);
  if (k >= grid.size()) throw std::out_of_range("needlet_eval: point index");
  const double t[1] = {cos_angle(x, grid.points[k])};
  double out[1];
  needlet_profile(sys, j, grid.weights[k], t, out);
  return out[0];
}

std::vector<double> analyze_level(const NeedletSystem& sys, int j, const BandlimitedFunction& f) {
  const auto& grid = sys.grid(j);
  std::vector<double> beta(grid.size(), 0.0);
  const MultipoleRange sup = sys.support(j);
  const int top = std::min(sup.last, f.lmax);
  if (sup.empty() || top < sup.first) return beta;
  const auto w = sys.window(j);
  BandlimitedFunction g = BandlimitedFunction::zero(top);
  for (int l = sup.first; l <= top; ++l) {
    for (int m = -l; m <= l; ++m) g.coefficient(l, m) = w[static_cast<std::size_t>(l)] * f.coefficient(l, m);
  }
  parallel_for(grid.rings.size(), [&](std::size_t r) {
    const GridRing& ring = grid.rings[r];
    std::span<double> out(beta.data() + ring.first, static_cast<std::size_t>(ring.count));
    ring_synthesis(g, sup.first, top, ring, out);
    const double s = std::sqrt(ring.weight);
    for (double& v : out) v *= s;
  });
  return beta;
}

NeedletCoefficients analyze(const NeedletSystem& sys, const BandlimitedFunction& f, CoveragePolicy policy) {
  NeedletCoefficients out;
  out.uncovered_energy = sys.uncovered_energy(f);
  const double total = f.norm_squared();
  if (policy == CoveragePolicy::Reject && out.uncovered_energy > 1e-12 * std::max(total, 1e-300)) {
    throw CoverageError("analyze: function has energy outside the covered band (uncovered fraction " +
                            csv::number(out.uncovered_energy / total) + ")",
                        out.uncovered_energy);
  }
  for (int j = 0; j <= sys.last_level(); ++j) out.beta.push_back(analyze_level(sys, j, f));
  return out;
}

BandlimitedFunction synthesize(const NeedletSystem& sys, const NeedletCoefficients& coeffs, int lmax) {
  if (lmax < 0) lmax = sys.max_multipole();
  if (coeffs.beta.size() != static_cast<std::size_t>(sys.last_level() + 1)) {
    throw std::invalid_argument("synthesize: coefficient levels do not match the system");
  }
  BandlimitedFunction f = BandlimitedFunction::zero(lmax);
  for (int j = 0; j <= sys.last_level(); ++j) {
    const MultipoleRange sup = sys.support(j);
    const int top = std::min(sup.last, lmax);
    if (sup.empty() || top < sup.first) continue;
    const auto& grid = sys.grid(j);
    const auto& beta = coeffs.beta[static_cast<std::size_t>(j)];
    if (beta.size() != grid.size()) throw std::invalid_argument("synthesize: coefficient count mismatch");
    const auto w = sys.window(j);
    // Each order m is owned by one task, so the accumulation order is fixed.
    parallel_for(static_cast<std::size_t>(top) + 1, [&](std::size_t mi) {
      const int m = static_cast<int>(mi);
      const int lo = std::max(sup.first, m);
      std::vector<double> col(static_cast<std::size_t>(top - m + 1));
      std::vector<double> acc_c(static_cast<std::size_t>(top - lo + 1), 0.0);
      std::vector<double> acc_s(acc_c.size(), 0.0);
      for (const GridRing& ring : grid.rings) {
        const double step = 2.0 * kPi / ring.count;
        double c = 0.0, s = 0.0;
        for (int k = 0; k < ring.count; ++k) {
          const double v = beta[ring.first + static_cast<std::size_t>(k)];
          const double phi = m * (ring.phase + k * step);
          c += v * std::cos(phi);
          if (m > 0) s += v * std::sin(phi);
        }
        const double sw = std::sqrt(ring.weight);
        c *= sw * (m == 0 ? 1.0 : kSqrt2);
        s *= sw * kSqrt2;
        if (c == 0.0 && s == 0.0) continue;
        associated_legendre_column(top, m, ring.x, col);
        for (int l = lo; l <= top; ++l) {
          const double p = col[static_cast<std::size_t>(l - m)];
          acc_c[static_cast<std::size_t>(l - lo)] += c * p;
          acc_s[static_cast<std::size_t>(l - lo)] += s * p;
        }
      }
      for (int l = lo; l <= top; ++l) {
        const double b = w[static_cast<std::size_t>(l)];
        f.coefficient(l, m) += b * acc_c[static_cast<std::size_t>(l - lo)];
        if (m > 0) f.coefficient(l, -m) += b * acc_s[static_cast<std::size_t>(l - lo)];
      }
    });
  }
  return f;
}

double frame_energy_gap(const NeedletSystem& sys, const BandlimitedFunction& f) {
  const double total = f.norm_squared();
  if (!(total > 0.0)) throw std::invalid_argument("frame_energy_gap: zero function");
  const NeedletCoefficients c = analyze(sys, f, CoveragePolicy::Report);
  return std::abs(c.energy() - total) / total;
}

std::string coefficients_csv(const NeedletSystem& sys, const NeedletCoefficients& coeffs) {
  std::string out = "j,k,theta_k,phi_k,beta\n";
  for (std::size_t j = 0; j < coeffs.beta.size(); ++j) {
    const auto& grid = sys.grid(static_cast<int>(j));
    for (std::size_t k = 0; k < coeffs.beta[j].size(); ++k) {
      csv::append_row(out, {csv::number(j), csv::number(k), csv::number(grid.points[k].theta),
                            csv::number(grid.points[k].phi), csv::number(coeffs.beta[j][k])});
    }
  }
  return out;
}

std::string LocalizationProfile::to_csv() const {
  std::string out = "theta,abs_psi\n";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    csv::append_row(out, {csv::number(theta[i]), csv::number(abs_psi[i])});
  }
  return out;
}

LocalizationProfile localization_profile(const NeedletSystem& sys, int j, std::size_t k,
                                         std::span<const double> theta) {
  const auto& grid = sys.grid(j);
  if (k >= grid.size()) throw std::out_of_range("localization_profile: point index");
  LocalizationProfile p;
  p.level = j;
  p.theta.assign(theta.begin(), theta.end());
  std::vector<double> t(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0 && theta[i] <= kPi)) throw std::invalid_argument("localization_profile: angles must lie in (0, pi]");
    if (i > 0 && !(theta[i] > theta[i - 1])) throw std::invalid_argument("localization_profile: angles must increase");
    t[i] = std::cos(theta[i]);
  }
  p.psi.resize(theta.size());
  needlet_profile(sys, j, grid.weights[k], t, p.psi);
  p.abs_psi.resize(theta.size());
  std::transform(p.psi.begin(), p.psi.end(), p.abs_psi.begin(), [](double v) { return std::abs(v); });
  p.envelope.resize(theta.size());
  double run = 0.0;
  for (std::size_t i = theta.size(); i-- > 0;) {
    run = std::max(run, p.abs_psi[i]);
    p.envelope[i] = run;
  }
  return p;
}

namespace {

DecayFit least_squares_decay(std::span<const double> theta, std::span<const double> envelope,
                             double scale, double lo, double hi) {
  DecayFit fit;
  fit.scale = scale;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double th = theta[i];
    if (th < lo || th > hi || !(envelope[i] > 0.0)) continue;
    const double x = std::log1p(scale * th);
    const double y = std::log(envelope[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.points;
  }
  fit.exponent = std::numeric_limits<double>::quiet_NaN();
  if (fit.points < 2) return fit;
  const double n = static_cast<double>(fit.points);
  const double denom = n * sxx - sx * sx;
  if (denom > 0.0) fit.exponent = -(n * sxy - sx * sy) / denom;
  return fit;
}

}  // namespace

DecayFit fit_decay(const LocalizationProfile& profile, double scale, double lo, double hi) {
  return least_squares_decay(profile.theta, profile.envelope, scale, lo, hi);
}

DecayFit fit_envelope_decay(std::span<const double> theta, std::span<const double> values,
                            double scale, double lo, double hi) {
  if (theta.size() != values.size()) throw std::invalid_argument("fit_envelope_decay: size mismatch");
  std::vector<double> env(values.size());
  double run = 0.0;
  for (std::size_t i = values.size(); i-- > 0;) {
    run = std::max(run, std::abs(values[i]));
    env[i] = run;
  }
  return least_squares_decay(theta, env, scale, lo, hi);
}

LocalizationFits fit_localization(const NeedletSystem& sys, const LocalizationProfile& profile,
                                  double lo, double hi) {
  const int j = profile.level;
  const double lower = j >= 1 ? sys.scales().center(j - 1) : 1.0;
  const double gap = j >= 1 ? sys.scales().center(j) - lower : 1.0;
  return {fit_decay(profile, lower, lo, hi), fit_decay(profile, gap, lo, hi)};
}

double main_lobe_radius(const LocalizationProfile& profile) {
  for (std::size_t i = 1; i < profile.psi.size(); ++i) {
    if ((profile.psi[i] > 0.0) != (profile.psi[0] > 0.0)) return profile.theta[i];
  }
  return kPi;
}

bool local_peaks_nonincreasing(const LocalizationProfile& profile, double rel_tol) {
  const auto& a = profile.abs_psi;
  if (a.size() < 3) return true;
  const double tol = rel_tol * *std::max_element(a.begin(), a.end());
  const double lobe = main_lobe_radius(profile);
  double last_peak = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    if (profile.theta[i] <= lobe) continue;
    if (a[i] >= a[i - 1] && a[i] >= a[i + 1]) {
      if (a[i] > last_peak + tol) return false;
      last_peak = a[i];
    }
  }
  // The endpoint theta = pi can host a final lobe.
  if (profile.theta.back() > lobe && a.back() > a[a.size() - 2] && a.back() > last_peak + tol) return false;
  return true;
}

bool envelope_monotone(const LocalizationProfile& profile) {
  const auto& a = profile.abs_psi;
  const auto& e = profile.envelope;
  if (a.empty()) return true;
  const double lobe = main_lobe_radius(profile);
  double peak = 0.0;
  std::size_t i = 0;
  for (; i < a.size() && profile.theta[i] < lobe; ++i) peak = std::max(peak, a[i]);
  for (std::size_t k = i; k < a.size(); ++k) {
    if (e[k] < a[k] || !(e[k] < peak)) return false;
    if (k > i && e[k] > e[k - 1]) return false;
  }
  return true;
}

double envelope_width(const LocalizationProfile& profile, double frac) {
  if (profile.abs_psi.empty()) return kPi;
  const double level = frac * profile.abs_psi.front();
  for (std::size_t i = 0; i < profile.envelope.size(); ++i) {
    if (profile.envelope[i] <= level) return profile.theta[i];
  }
  return kPi;
}

std::size_t representative_point(const NeedletSystem& sys, int j) {
  const auto& grid = sys.grid(j);
  return static_cast<std::size_t>(std::max_element(grid.weights.begin(), grid.weights.end()) -
                                  grid.weights.begin());
}

double l2_norm_squared_spectral(const NeedletSystem& sys, int j, std::size_t k) {
  const auto& grid = sys.grid(j);
  if (k >= grid.size()) throw std::out_of_range("l2_norm_squared_spectral: point index");
  const auto w = sys.window(j);
  double sum = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) sum += w[l] * w[l] * (2.0 * l + 1.0) / kFourPi;
  return grid.weights[k] * sum;
}

double lq_norm(const NeedletSystem& sys, int j, std::size_t k, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be in [1, inf]");
  const auto& grid = sys.grid(j);
  if (k >= grid.size()) throw std::out_of_range("lq_norm: point index");
  const double lambda = grid.weights[k];
  const int top = static_cast<int>(sys.window(j).size()) - 1;
  if (top < 0) return 0.0;
  // psi_{j,k} is zonal about xi_{j,k}: ||psi||_q^q = 2 pi int_{-1}^{1} |g(t)|^q dt.
  const bool even_integer = std::isfinite(q) && q == std::floor(q) && std::fmod(q, 2.0) == 0.0;
  const int nodes = even_integer ? static_cast<int>(q) * top / 2 + 1 : 8 * top + 64;
  const GaussLegendreRule rule = gauss_legendre(nodes);
  std::vector<double> g(rule.nodes.size());
  needlet_profile(sys, j, lambda, rule.nodes, g);
  if (std::isinf(q)) {
    const double t1[1] = {1.0};
    double g1[1];
    needlet_profile(sys, j, lambda, t1, g1);
    double peak = std::abs(g1[0]);
    for (double v : g) peak = std::max(peak, std::abs(v));
    return peak;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) sum += rule.weights[i] * std::pow(std::abs(g[i]), q);
  return std::pow(2.0 * kPi * sum, 1.0 / q);
}

}  // namespace flexneedlet
