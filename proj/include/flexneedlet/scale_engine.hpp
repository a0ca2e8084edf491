#pragma once

// Scale sequences S_j built from regularly varying shift sequences
// eps_j = gamma(j) j^p, with S_j = exp(sum_{k<j} eps_k), and the diagnostics
// derived from them (dilation h_j, relative bandwidth Delta_j, logarithmic
// growth index L_j, separation ratio R_j(beta), localization rate).
//
// All sequences are accumulated in the log domain; S_j is exponentiated on
// demand, so stretched and double-exponential families remain usable far
// beyond the range where S_j itself is representable.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flexneedlet {

enum class ShiftFamily {
  Logarithmic,                // eps_j = eta / (j log j)
  Polynomial,                 // eps_j = eta / j
  LogPowerExponential,        // eps_j = eta q (log j)^(q-1) / j
  MildExponential,            // eps_j = eta j^(-decay), decay in (0,1)
  StandardGeometric,          // eps_j = log B
  StretchedSuperExponential,  // eps_j = j^p, p > 0
  DoubleExponential,          // eps_j = a B^j
  ExplicitTable,              // eps_k = values[k], k = 0..n-1
};

std::string_view family_name(ShiftFamily family);
ShiftFamily parse_family(std::string_view name);

/// Parametrized shift sequence. Construct through the named factories, which
/// enforce each family's parameter constraints.
struct ShiftModel {
  ShiftFamily family = ShiftFamily::StandardGeometric;
  double eta = 1.0;
  double q = 0.5;
  /// Family exponent as written in the family's formula: the decay exponent
  /// of MildExponential (eps_j = eta j^-p) or the growth exponent of
  /// StretchedSuperExponential (eps_j = j^p). See regularity_index().
  double p = 0.0;
  double base = 2.0;  // B
  double a = 1.0;
  std::vector<double> values;

  static ShiftModel logarithmic(double eta);
  static ShiftModel polynomial(double eta);
  static ShiftModel log_power_exponential(double eta, double q);
  static ShiftModel mild_exponential(double eta, double decay);
  static ShiftModel standard_geometric(double base);
  static ShiftModel stretched_super_exponential(double p);
  static ShiftModel double_exponential(double a, double base);
  static ShiftModel explicit_table(std::vector<double> shifts);

  /// Index p of regular variation, eps_j = gamma(j) j^p. NaN for tables and
  /// for the rapidly varying double-exponential family.
  double regularity_index() const;

  /// Human-readable description of the slowly varying factor gamma(j).
  std::string gamma_description() const;

  /// True when the formula contains log j (undefined at j = 1).
  bool has_log_factor() const;

  /// Smallest j at which the family formula is evaluated; shifts below this
  /// index continue the value at it.
  int first_formula_index() const;

  /// Throws std::invalid_argument if the parameters violate the family constraints.
  void validate() const;

  std::string label() const;
};

/// eps_j for j >= 1 (j >= 2 for log-containing families).
double shift_value(const ShiftModel& model, long long j);

/// Shift used to accumulate log S_{k+1} - log S_k for k >= 0: the family
/// formula at max(k, first_formula_index()), or values[k] for tables.
double effective_shift(const ShiftModel& model, long long k);

enum class Regime { Shrinking, Stable, Spreading, Undetermined };
enum class Convergence { TotallyConvergent, Divergent, NotApplicable };

std::string_view regime_name(Regime r);
std::string_view convergence_name(Convergence c);

/// Window centers S_0 = 1 < S_1 < ... < S_J and derived diagnostics.
class ScaleSequence {
 public:
  /// Builds from log-centers log S_0 = 0, ..., log S_J.
  explicit ScaleSequence(std::vector<double> log_centers);

  /// Builds from explicit centers (must start at 1 and be strictly increasing).
  static ScaleSequence from_centers(const std::vector<double>& centers);

  /// Number of the last center, J.
  int last_index() const { return static_cast<int>(log_s_.size()) - 1; }

  double center(int j) const;      // S_j
  double log_center(int j) const;  // log S_j
  const std::vector<double>& log_centers() const { return log_s_; }
  std::vector<double> centers() const;

  double dilation_factor(int j) const;   // h_j = S_{j+1}/S_j, 0 <= j <= J-1
  double bandwidth_ratio(int j) const;   // Delta_j, 1 <= j <= J-1
  double log_growth_index(int j) const;  // L_j = log(S_j)/j, 1 <= j <= J

  /// R_j(beta) = (S_j - S_{j-1}) / S_{j-1}^(1-beta), 1 <= j <= J.
  double separation_ratio(int j, double beta) const;
  /// log R_j(beta); finite even when R_j overflows.
  double log_separation_ratio(int j, double beta) const;

  Regime regime() const { return regime_; }
  Convergence convergence() const { return convergence_; }
  bool truncated() const { return truncated_; }
  const std::optional<ShiftModel>& model() const { return model_; }

  void set_classification(Regime r, Convergence c) {
    regime_ = r;
    convergence_ = c;
  }
  void set_provenance(std::optional<ShiftModel> m, bool truncated) {
    model_ = std::move(m);
    truncated_ = truncated;
  }

  /// CSV with header `j,S,h,delta,L`; undefined entries are left empty.
  std::string to_csv() const;

 private:
  void check_index(int j, int lo, int hi, const char* what) const;

  std::vector<double> log_s_;
  Regime regime_ = Regime::Undetermined;
  Convergence convergence_ = Convergence::NotApplicable;
  bool truncated_ = false;
  std::optional<ShiftModel> model_;
};

/// S_0..S_J with S_j = exp(sum_{k=0}^{j-1} eps_k). Requires J >= 3. If a
/// center overflows double precision the sequence stops at the last finite
/// center and truncated() is set.
ScaleSequence build_scales(const ShiftModel& model, int J);

inline constexpr double kDefaultRegimeTolerance = 0.05;

/// Finite-horizon regime label from the trend of Delta_j over the tail half
/// of the sequence. Requires J >= 16; returns Undetermined when the trend
/// tests disagree or none applies.
Regime classify_regime(const ScaleSequence& seq, double tol = kDefaultRegimeTolerance);

/// Shrinking subcase: analytic families by their index, tables and explicit
/// centers by checking |S_J - S_{J/2}| / S_J < tol.
Convergence classify_convergence(const ScaleSequence& seq, Regime regime,
                                 double tol = kDefaultRegimeTolerance);

/// Leading-order closed form of S_j for the analytic families (j real, > 1).
double closed_form_scale(const ShiftModel& model, double j);

struct SeparationCheck {
  std::optional<long long> satisfied_from;  // first j after which R_j(beta) > 1 for all j <= horizon
  long long horizon = 0;
  double final_log_ratio = 0.0;  // log R_J(beta)
};

/// Scans R_j(beta) for 1 <= j <= horizon in the log domain.
SeparationCheck separation_threshold_check(const ShiftModel& model, double beta,
                                           long long horizon = 1000000);

/// Localization rate Sigma_{j;p} for shrinking families with regularity
/// index in [-1, 0). Throws for families outside that range.
double localization_rate(const ShiftModel& model, double j);

}  // namespace flexneedlet
