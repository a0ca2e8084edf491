#pragma once

// Needlets psi_{j,k}(x) = sqrt(lambda_{j,k}) sum_{l in Lambda_j} b_j(l) Z_l(<x, xi_{j,k}>)
// on the level-j cubature grid, the analysis/synthesis pair and the frame,
// localization and L^q diagnostics.
//
// Levels run from 0 to J-1. Level 0 carries the residual window sqrt(a_1), so
// the squared windows of all levels sum to a_J, which is 1 for l <= S_{J-1}.
// Energy at multipoles where a_J < 1 is reported as uncovered.

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexneedlet/cubature.hpp"
#include "flexneedlet/sphere_harmonics.hpp"
#include "flexneedlet/window_builder.hpp"

namespace flexneedlet {

/// Real harmonic expansion f = sum a_lm Y_lm, indexed by harmonic_index(l, m).
struct BandlimitedFunction {
  int lmax = 0;
  std::vector<double> coeffs;

  static BandlimitedFunction zero(int lmax);
  static BandlimitedFunction single(int lmax, int l, int m);

  double coefficient(int l, int m) const { return coeffs[harmonic_index(l, m)]; }
  double& coefficient(int l, int m) { return coeffs[harmonic_index(l, m)]; }
  /// ||f||^2 = sum a_lm^2.
  double norm_squared() const;
  /// sum_m a_lm^2.
  double degree_energy(int l) const;
  double eval(const SpherePoint& x) const;
};

struct NeedletCoefficients {
  /// beta[j][k]; one entry per grid point of level j.
  std::vector<std::vector<double>> beta;
  /// sum_l (1 - a_J(l)) ||f_l||^2 of the analyzed function.
  double uncovered_energy = 0.0;

  double energy() const;
};

enum class CoveragePolicy { Reject, Report };

class CoverageError : public std::domain_error {
 public:
  CoverageError(const std::string& what, double uncovered)
      : std::domain_error(what), uncovered_energy(uncovered) {}
  double uncovered_energy;
};

class NeedletSystem {
 public:
  explicit NeedletSystem(WindowSystem windows, GridLayout layout = GridLayout::Reduced);

  const WindowSystem& windows() const { return windows_; }
  const ScaleSequence& scales() const { return windows_.scales(); }
  int last_level() const { return windows_.last_level(); }
  GridLayout layout() const { return layout_; }

  MultipoleRange support(int j) const { return levels_.at(static_cast<std::size_t>(j))->support; }
  /// b_j(l) for l = 0..support(j).last (zero below the support).
  std::span<const double> window(int j) const { return levels_.at(static_cast<std::size_t>(j))->b; }
  /// Level grid (bandlimit 2 ceil(S_{j+1})), built on first request.
  const SphericalGrid& grid(int j) const;

  /// Highest multipole carried by any level.
  int max_multipole() const;
  /// a_J(l) = sum_j b_j(l)^2.
  double coverage(int l) const;
  /// Largest l with coverage 1 for every l' <= l.
  int covered_lmax() const;
  /// sum_l (1 - a_J(l)) ||f_l||^2.
  double uncovered_energy(const BandlimitedFunction& f) const;

 private:
  struct Level {
    MultipoleRange support;
    std::vector<double> b;
    std::once_flag once;
    std::unique_ptr<SphericalGrid> grid;
  };
  WindowSystem windows_;
  GridLayout layout_;
  std::vector<std::unique_ptr<Level>> levels_;
};

/// Psi_j(x, y) = sum_l b_j(l)^2 Z_l(x, y).
double kernel_eval(const NeedletSystem& sys, int j, const SpherePoint& x, const SpherePoint& y);

/// Zonal profile sqrt(lambda) sum_l b_j(l) (2l+1)/(4 pi) P_l(t) for each t.
void needlet_profile(const NeedletSystem& sys, int j, double lambda, std::span<const double> t,
                     std::span<double> out);

double needlet_eval(const NeedletSystem& sys, int j, std::size_t k, const SpherePoint& x);

/// beta_{j,k} = <f, psi_{j,k}>, computed from the harmonic coefficients.
NeedletCoefficients analyze(const NeedletSystem& sys, const BandlimitedFunction& f,
                            CoveragePolicy policy = CoveragePolicy::Reject);

/// Coefficients of a single level.
std::vector<double> analyze_level(const NeedletSystem& sys, int j, const BandlimitedFunction& f);

/// sum_{j,k} beta_{j,k} psi_{j,k} as a harmonic expansion up to lmax
/// (default: max_multipole()).
BandlimitedFunction synthesize(const NeedletSystem& sys, const NeedletCoefficients& coeffs,
                               int lmax = -1);

/// |sum beta^2 - ||f||^2| / ||f||^2; f with uncovered energy is accepted and
/// the gap then equals the uncovered fraction.
double frame_energy_gap(const NeedletSystem& sys, const BandlimitedFunction& f);

/// CSV `j,k,theta_k,phi_k,beta`.
std::string coefficients_csv(const NeedletSystem& sys, const NeedletCoefficients& coeffs);

struct LocalizationProfile {
  int level = 0;
  std::vector<double> theta;
  std::vector<double> psi;
  std::vector<double> abs_psi;
  std::vector<double> envelope;  // running maximum from the right

  /// CSV `theta,abs_psi`.
  std::string to_csv() const;
};

/// |psi_{j,k}| along a geodesic from xi_{j,k}; theta values in (0, pi].
LocalizationProfile localization_profile(const NeedletSystem& sys, int j, std::size_t k,
                                         std::span<const double> theta);

struct DecayFit {
  double scale = 0.0;     // D
  double exponent = 0.0;  // m, from log envelope ~ -m log(1 + D theta)
  std::size_t points = 0;
};

/// Least-squares decay exponent of the envelope over theta in [lo, hi].
DecayFit fit_decay(const LocalizationProfile& profile, double scale, double lo, double hi);

/// Same fit for arbitrary samples: values are replaced by their running
/// maximum from the right before fitting. theta must be increasing.
DecayFit fit_envelope_decay(std::span<const double> theta, std::span<const double> values,
                            double scale, double lo, double hi);

struct LocalizationFits {
  DecayFit lower_scale;  // D = S_{j-1}
  DecayFit gap_scale;    // D = S_j - S_{j-1}
};

LocalizationFits fit_localization(const NeedletSystem& sys, const LocalizationProfile& profile,
                                  double lo, double hi);

/// First angle at which |psi| changes sign (end of the main lobe); pi if none.
double main_lobe_radius(const LocalizationProfile& profile);

/// Local maxima of |psi| beyond the main lobe are nonincreasing, up to
/// rel_tol times the largest |psi| of the profile. Stricter than
/// envelope_monotone: side lobes of coarse levels need not satisfy it.
bool local_peaks_nonincreasing(const LocalizationProfile& profile, double rel_tol = 1e-9);

/// Envelope check beyond the main lobe: the envelope is nonincreasing,
/// dominates |psi| and stays below the peak of the main lobe.
bool envelope_monotone(const LocalizationProfile& profile);

/// First angle at which the envelope falls to frac times |psi| at the first
/// sample; pi if it never does.
double envelope_width(const LocalizationProfile& profile, double frac);

/// Grid point with the largest cubature weight; used as the representative
/// needlet of a level.
std::size_t representative_point(const NeedletSystem& sys, int j);

/// ||psi_{j,k}||_q for q in [1, inf] (q = inf as std::numeric_limits<double>::infinity()).
double lq_norm(const NeedletSystem& sys, int j, std::size_t k, double q);

/// lambda_{j,k} sum_l b_j(l)^2 (2l+1)/(4 pi).
double l2_norm_squared_spectral(const NeedletSystem& sys, int j, std::size_t k);

}  // namespace flexneedlet
