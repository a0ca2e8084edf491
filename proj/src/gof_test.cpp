#include "flexneedlet/gof_test.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "flexneedlet/csv.hpp"
#include "flexneedlet/parallel.hpp"

namespace flexneedlet {

namespace {

constexpr std::uint64_t kSubsampleStream = 0x5eed5eedULL;

struct Moments {
  double mean = 0.0, variance = 0.0, m4 = 0.0, skewness = 0.0, excess_kurtosis = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2 * n / (n - 1.0);
  m.m4 = m4;
  m.skewness = m3 / std::pow(m2, 1.5);
  m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return m;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

int max_level(const GofConfig& config) {
  return *std::max_element(config.levels.begin(), config.levels.end());
}

}  // namespace

ScaleSequence gof_scales(const GofConfig& config) {
  if (config.levels.empty()) throw std::invalid_argument("gof: no levels configured");
  return build_scales(config.shift, std::max(3, max_level(config) + 1));
}

double gof_spacing(const ScaleSequence& scales, int j, double beta, double eps_sep) {
  if (j < 1 || j > scales.last_index()) throw std::out_of_range("gof_spacing: level");
  return std::pow(scales.center(j - 1), -(1.0 - beta - eps_sep));
}

std::vector<std::size_t> gof_subsample(const NeedletSystem& sys, int j, double beta, double eps_sep,
                                       std::uint64_t seed) {
  const double d = gof_spacing(sys.scales(), j, beta, eps_sep);
  return subsample_separated(sys.grid(j), d, derive_seed(seed, kSubsampleStream, static_cast<std::uint64_t>(j)));
}

double exact_variance(const NeedletSystem& sys, const SpectrumModel& model, int j,
                      std::span<const std::size_t> subset) {
  const std::size_t n = subset.size();
  if (n == 0) throw std::invalid_argument("exact_variance: empty subsample");
  const auto& grid = sys.grid(j);
  const double one[1] = {1.0};
  double diag[1];
  covariance_kernel(sys, model, j, one, diag);
  // Correlations depend on the angle only; evaluate the kernel row by row.
  std::vector<double> row_sums(n, 0.0);
  parallel_for(n, [&](std::size_t a) {
    std::vector<double> t(n - a - 1), v(n - a - 1);
    for (std::size_t b = a + 1; b < n; ++b) t[b - a - 1] = cos_angle(grid.points[subset[a]], grid.points[subset[b]]);
    covariance_kernel(sys, model, j, t, v);
    double s = 0.0;
    for (double c : v) s += (c / diag[0]) * (c / diag[0]);
    row_sums[a] = s;
  });
  double off = 0.0;
  for (double s : row_sums) off += s;
  const double card = static_cast<double>(n);
  return 2.0 * (card + 2.0 * off) / (card * card);
}

void validate_gof(const GofConfig& config) {
  if (config.levels.empty()) throw std::invalid_argument("gof: no levels configured");
  for (int j : config.levels) {
    if (j < 1) throw std::invalid_argument("gof: levels must be >= 1");
  }
  if (!(config.eps_sep > 0.0)) throw std::invalid_argument("gof: eps_sep must be > 0");
  const double beta = config.spectrum.beta_smoothness;
  if (!(1.0 - beta - config.eps_sep > 0.0)) throw std::invalid_argument("gof: need beta + eps_sep < 1");
  if (config.replicates < 2) throw std::invalid_argument("gof: replicates must be >= 2");
  config.shift.validate();
  config.spectrum.validate();
  const ScaleSequence scales = gof_scales(config);
  for (int j : config.levels) {
    if (j + 1 > scales.last_index() || !(scales.center(j + 1) <= kGofBandCap)) {
      throw GofInfeasible("gof: level " + std::to_string(j) + " needs S_{j+1} <= " + csv::number(kGofBandCap));
    }
  }
  if (config.require_separation) {
    const SeparationCheck chk = separation_threshold_check(config.shift, beta);
    if (!chk.satisfied_from) {
      throw GofInfeasible("gof: separation condition R_j(beta) > 1 fails for " + config.shift.label());
    }
    for (int j : config.levels) {
      if (j < *chk.satisfied_from) {
        throw GofInfeasible("gof: level " + std::to_string(j) + " precedes the separation threshold (j >= " +
                            std::to_string(*chk.satisfied_from) + ")");
      }
    }
  }
}

std::vector<double> exact_variance(const GofConfig& config) {
  validate_gof(config);
  const NeedletSystem sys(WindowSystem(gof_scales(config)));
  std::vector<double> out;
  for (int j : config.levels) {
    const auto d = gof_subsample(sys, j, config.spectrum.beta_smoothness, config.eps_sep, config.seed);
    out.push_back(exact_variance(sys, config.spectrum, j, d));
  }
  return out;
}

double kolmogorov_distance(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("kolmogorov_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

GofReport run_gof(const GofConfig& config) {
  validate_gof(config);
  const NeedletSystem sys(WindowSystem(gof_scales(config)));
  const double beta = config.spectrum.beta_smoothness;
  GofReport report;
  for (int j : config.levels) {
    GofLevelReport lr;
    lr.level = j;
    lr.spacing = gof_spacing(sys.scales(), j, beta, config.eps_sep);
    const auto d = gof_subsample(sys, j, beta, config.eps_sep, config.seed);
    lr.card = d.size();
    if (lr.card < 2) throw GofInfeasible("gof: subsample of level " + std::to_string(j) + " has fewer than 2 points");
    lr.min_distance = min_separation(sys.grid(j), d);
    if (lr.min_distance < lr.spacing) throw std::logic_error("gof: subsample violates the spacing");
    lr.exact_variance = exact_variance(sys, config.spectrum, j, d);

    const LevelProjector proj(sys, j, d);
    std::vector<double> inv_sigma(lr.card);
    for (std::size_t i = 0; i < lr.card; ++i) {
      inv_sigma[i] = 1.0 / std::sqrt(coeff_covariance(sys, config.spectrum, j, d[i], d[i]));
    }
    const auto R = static_cast<std::size_t>(config.replicates);
    std::vector<double> stat(R);
    std::vector<double> squares(R * lr.card);
    parallel_for(R, [&](std::size_t r) {
      std::vector<double> band(proj.harmonics());
      std::vector<double> b(lr.card);
      proj.simulate(config.spectrum, config.seed, r, band);
      proj.apply(band, b);
      double s = 0.0;
      for (std::size_t i = 0; i < lr.card; ++i) {
        const double z = b[i] * inv_sigma[i];
        squares[r * lr.card + i] = z * z;
        s += z * z - 1.0;
      }
      stat[r] = s / static_cast<double>(lr.card);
    });

    const Moments m = moments(stat);
    const double n = static_cast<double>(R);
    lr.mean = m.mean;
    lr.mean_se = std::sqrt(m.variance / n);
    lr.variance = m.variance;
    lr.variance_se = std::sqrt(std::max(m.m4 - m.variance * m.variance, 0.0) / n);
    lr.skewness = m.skewness;
    lr.excess_kurtosis = m.excess_kurtosis;
    std::vector<double> standardized(R);
    const double scale = 1.0 / std::sqrt(lr.exact_variance);
    for (std::size_t r = 0; r < R; ++r) standardized[r] = stat[r] * scale;
    lr.ks = kolmogorov_distance(std::move(standardized));

    for (std::size_t i = 0; i < lr.card; ++i) {
      double s = 0.0, ss = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const double v = squares[r * lr.card + i];
        s += v;
        ss += v * v;
      }
      const double mean = s / n;
      const double se = std::sqrt(std::max(ss / n - mean * mean, 0.0) / n);
      if (se > 0.0) lr.max_normalization_z = std::max(lr.max_normalization_z, std::abs(mean - 1.0) / se);
    }
    report.levels.push_back(lr);
  }
  return report;
}

std::string GofReport::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& l : levels) {
    j.push_back({{"level", l.level},
                 {"card", l.card},
                 {"spacing", l.spacing},
                 {"min_distance", l.min_distance},
                 {"mean", l.mean},
                 {"mean_se", l.mean_se},
                 {"variance", l.variance},
                 {"variance_se", l.variance_se},
                 {"exact_variance", l.exact_variance},
                 {"skewness", l.skewness},
                 {"excess_kurtosis", l.excess_kurtosis},
                 {"ks", l.ks},
                 {"max_normalization_z", l.max_normalization_z}});
  }
  return nlohmann::ordered_json{{"levels", j}}.dump(2) + "\n";
}

std::string GofReport::to_csv() const {
  std::string out = "j,card,mean,var,exact_var,skew,exkurt,ks\n";
  for (const auto& l : levels) {
    csv::append_row(out, {csv::number(l.level), csv::number(l.card), csv::number(l.mean), csv::number(l.variance),
                          csv::number(l.exact_variance), csv::number(l.skewness),
                          csv::number(l.excess_kurtosis), csv::number(l.ks)});
  }
  return out;
}

}  // namespace flexneedlet
