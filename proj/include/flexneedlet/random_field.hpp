#pragma once

// Isotropic Gaussian fields T = sum a_lm Y_lm with Var(a_lm) = C_l and
// C_l = G(l) l^-alpha, and the covariance of their needlet coefficients
//   Cov(beta_{j,k}, beta_{j,k'}) = sqrt(lambda_k lambda_k')
//       sum_l b_j(l)^2 C_l (2l+1)/(4 pi) P_l(cos Theta_{k,k'}).
// The monopole is excluded: a_00 = 0.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flexneedlet/needlet_frame.hpp"

namespace flexneedlet {

/// c (d + sin(u^beta / M)); c > 0, d > 1, M > 0, beta in (0, 1).
struct SineTerm {
  double c = 1.0;
  double d = 2.0;
  double M = 1.0;
  double beta = 0.5;
};

struct SpectrumModel {
  double alpha = 2.0;
  std::vector<SineTerm> terms;  // empty: G = 1
  double beta_smoothness = 0.0;

  static SpectrumModel unit(double alpha, double beta_smoothness = 0.0);
  /// beta_smoothness is set to the largest term beta.
  static SpectrumModel modulated_sine(double alpha, std::vector<SineTerm> terms);

  bool is_unit() const { return terms.empty(); }
  void validate() const;

  double modulation(double u) const;  // G(u)
  double modulation_lower_bound() const;
  double modulation_upper_bound() const;
  std::string label() const;

  /// CSV `l,C_l,G_l` for l = 1..lmax.
  std::string to_csv(int lmax) const;
};

/// C_l for l >= 1.
double spectrum_eval(const SpectrumModel& model, int l);

/// Seed of the stream that draws degree l of replicate `stream`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t l);

/// a_{l,-l..l} of one degree, drawn from its own stream so that any subset of
/// degrees reproduces the same values as a full simulation.
void simulate_degree(const SpectrumModel& model, int l, std::uint64_t seed, std::uint64_t stream,
                     std::span<double> out);

struct FieldSample {
  BandlimitedFunction field;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

FieldSample simulate_field(const SpectrumModel& model, int lmax, std::uint64_t seed,
                           std::uint64_t stream = 0);

/// Analytic covariance of beta_{j,k} and beta_{j,k'}.
double coeff_covariance(const NeedletSystem& sys, const SpectrumModel& model, int j, std::size_t k,
                        std::size_t k2);

double coeff_correlation(const NeedletSystem& sys, const SpectrumModel& model, int j, std::size_t k,
                         std::size_t k2);

/// Covariance kernel sum_l b_j(l)^2 C_l (2l+1)/(4 pi) P_l(t) at each t
/// (without the cubature weights).
void covariance_kernel(const NeedletSystem& sys, const SpectrumModel& model, int j,
                       std::span<const double> t, std::span<double> out);

/// beta_{j,k} for a fixed set of points of one level as a dense map from the
/// harmonic coefficients with l in Lambda_j (l >= 1), laid out contiguously
/// from harmonic_index(first, -first).
class LevelProjector {
 public:
  LevelProjector(const NeedletSystem& sys, int j, std::vector<std::size_t> points);

  int first_degree() const { return first_; }
  int last_degree() const { return last_; }
  std::size_t harmonics() const { return width_; }
  const std::vector<std::size_t>& points() const { return points_; }

  /// Draws the band coefficients of one replicate.
  void simulate(const SpectrumModel& model, std::uint64_t seed, std::uint64_t stream,
                std::span<double> band) const;
  /// beta[r] = <row r, band>.
  void apply(std::span<const double> band, std::span<double> beta) const;

 private:
  int first_ = 1;
  int last_ = 0;
  std::size_t width_ = 0;
  std::vector<std::size_t> points_;
  std::vector<double> rows_;
};

struct CovarianceEstimate {
  double analytic = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo covariance of the listed point pairs over `replicates` fields.
std::vector<CovarianceEstimate> empirical_covariance(
    const NeedletSystem& sys, const SpectrumModel& model, int j,
    std::span<const std::pair<std::size_t, std::size_t>> pairs, int replicates, std::uint64_t seed);

struct CorrelationRow {
  double theta = 0.0;
  double corr_analytic = 0.0;
  double corr_empirical = std::numeric_limits<double>::quiet_NaN();  // not simulated
  double se = std::numeric_limits<double>::quiet_NaN();
};

/// |Corr| of each pair sorted by angular distance.
std::vector<CorrelationRow> correlation_decay_profile(
    const NeedletSystem& sys, const SpectrumModel& model, int j,
    std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// CSV `theta,corr_analytic,corr_empirical,se`.
std::string correlation_csv(const std::vector<CorrelationRow>& rows);

/// min(S_{j-1}^(1-beta), S_j - S_{j-1}).
double correlation_decay_scale(const ScaleSequence& scales, int j, double beta);

/// Decay exponent of the |Corr| envelope against log(1 + D theta) over [lo, hi].
DecayFit fit_correlation_decay(const std::vector<CorrelationRow>& rows, double scale, double lo,
                               double hi);

struct RegularityFit {
  int order = 1;
  double exponent = 0.0;  // fitted slope of log peak |G^(r)| against log u
  double expected = 0.0;  // -(1 - beta) r
  std::size_t peaks = 0;
};

/// Fits the growth of local peaks of the r-th central difference of G over
/// [u_lo, u_hi]. Requires a modulated spectrum and r in {1, 2, 3}.
RegularityFit regularity_probe(const SpectrumModel& model, int r, double u_lo, double u_hi);

}  // namespace flexneedlet
