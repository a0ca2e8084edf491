#include "flexneedlet/scale_engine.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "flexneedlet/csv.hpp"

namespace flexneedlet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Largest log S_j for which exp() is finite.
const double kMaxLogCenter = std::log(DBL_MAX);

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

std::string_view family_name(ShiftFamily family) {
  switch (family) {
    case ShiftFamily::Logarithmic: return "logarithmic";
    case ShiftFamily::Polynomial: return "polynomial";
    case ShiftFamily::LogPowerExponential: return "log_power_exponential";
    case ShiftFamily::MildExponential: return "mild_exponential";
    case ShiftFamily::StandardGeometric: return "standard_geometric";
    case ShiftFamily::StretchedSuperExponential: return "stretched_super_exponential";
    case ShiftFamily::DoubleExponential: return "double_exponential";
    case ShiftFamily::ExplicitTable: return "explicit_table";
  }
  return "unknown";
}

ShiftFamily parse_family(std::string_view name) {
  for (auto f : {ShiftFamily::Logarithmic, ShiftFamily::Polynomial,
                 ShiftFamily::LogPowerExponential, ShiftFamily::MildExponential,
                 ShiftFamily::StandardGeometric, ShiftFamily::StretchedSuperExponential,
                 ShiftFamily::DoubleExponential, ShiftFamily::ExplicitTable}) {
    if (family_name(f) == name) return f;
  }
  throw std::invalid_argument("unknown shift family '" + std::string(name) + "'");
}

ShiftModel ShiftModel::logarithmic(double eta) {
  ShiftModel m;
  m.family = ShiftFamily::Logarithmic;
  m.eta = eta;
  m.validate();
  return m;
}

ShiftModel ShiftModel::polynomial(double eta) {
  ShiftModel m;
  m.family = ShiftFamily::Polynomial;
  m.eta = eta;
  m.validate();
  return m;
}

ShiftModel ShiftModel::log_power_exponential(double eta, double q) {
  ShiftModel m;
  m.family = ShiftFamily::LogPowerExponential;
  m.eta = eta;
  m.q = q;
  m.validate();
  return m;
}

ShiftModel ShiftModel::mild_exponential(double eta, double decay) {
  ShiftModel m;
  m.family = ShiftFamily::MildExponential;
  m.eta = eta;
  m.p = decay;
  m.validate();
  return m;
}

ShiftModel ShiftModel::standard_geometric(double base) {
  ShiftModel m;
  m.family = ShiftFamily::StandardGeometric;
  m.base = base;
  m.validate();
  return m;
}

ShiftModel ShiftModel::stretched_super_exponential(double p) {
  ShiftModel m;
  m.family = ShiftFamily::StretchedSuperExponential;
  m.p = p;
  m.validate();
  return m;
}

ShiftModel ShiftModel::double_exponential(double a, double base) {
  ShiftModel m;
  m.family = ShiftFamily::DoubleExponential;
  m.a = a;
  m.base = base;
  m.validate();
  return m;
}

ShiftModel ShiftModel::explicit_table(std::vector<double> shifts) {
  ShiftModel m;
  m.family = ShiftFamily::ExplicitTable;
  m.values = std::move(shifts);
  m.validate();
  return m;
}

void ShiftModel::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  switch (family) {
    case ShiftFamily::Logarithmic:
    case ShiftFamily::Polynomial:
      require(positive(eta), "eta must be > 0");
      break;
    case ShiftFamily::LogPowerExponential:
      require(positive(eta), "eta must be > 0");
      require(q > 0.0 && q < 1.0, "q must lie in (0, 1)");
      break;
    case ShiftFamily::MildExponential:
      require(positive(eta), "eta must be > 0");
      require(p > 0.0 && p < 1.0, "mild exponential decay exponent must lie in (0, 1)");
      break;
    case ShiftFamily::StandardGeometric:
      require(std::isfinite(base) && base > 1.0, "B must be > 1");
      break;
    case ShiftFamily::StretchedSuperExponential:
      require(positive(p), "stretched super-exponential p must be > 0");
      break;
    case ShiftFamily::DoubleExponential:
      require(positive(a), "a must be > 0");
      require(std::isfinite(base) && base > 1.0, "B must be > 1");
      break;
    case ShiftFamily::ExplicitTable:
      require(!values.empty(), "explicit table must not be empty");
      for (double v : values) require(positive(v), "explicit table shifts must be strictly positive");
      break;
  }
}

double ShiftModel::regularity_index() const {
  switch (family) {
    case ShiftFamily::Logarithmic:
    case ShiftFamily::Polynomial:
    case ShiftFamily::LogPowerExponential:
      return -1.0;
    case ShiftFamily::MildExponential:
      return -p;
    case ShiftFamily::StandardGeometric:
      return 0.0;
    case ShiftFamily::StretchedSuperExponential:
      return p;
    case ShiftFamily::DoubleExponential:
    case ShiftFamily::ExplicitTable:
      return kNaN;
  }
  return kNaN;
}

std::string ShiftModel::gamma_description() const {
  std::ostringstream os;
  switch (family) {
    case ShiftFamily::Logarithmic: os << eta << "/log(j)"; break;
    case ShiftFamily::Polynomial: os << eta; break;
    case ShiftFamily::LogPowerExponential: os << eta * q << "*log(j)^" << (q - 1.0); break;
    case ShiftFamily::MildExponential: os << eta; break;
    case ShiftFamily::StandardGeometric: os << "log(" << base << ")"; break;
    case ShiftFamily::StretchedSuperExponential: os << 1; break;
    case ShiftFamily::DoubleExponential: os << a << "*" << base << "^j (rapidly varying)"; break;
    case ShiftFamily::ExplicitTable: os << "table"; break;
  }
  return os.str();
}

bool ShiftModel::has_log_factor() const {
  return family == ShiftFamily::Logarithmic || family == ShiftFamily::LogPowerExponential;
}

int ShiftModel::first_formula_index() const { return has_log_factor() ? 2 : 1; }

std::string ShiftModel::label() const {
  std::ostringstream os;
  os << family_name(family);
  switch (family) {
    case ShiftFamily::Logarithmic:
    case ShiftFamily::Polynomial: os << "(eta=" << eta << ")"; break;
    case ShiftFamily::LogPowerExponential: os << "(eta=" << eta << ",q=" << q << ")"; break;
    case ShiftFamily::MildExponential: os << "(eta=" << eta << ",p=" << p << ")"; break;
    case ShiftFamily::StandardGeometric: os << "(B=" << base << ")"; break;
    case ShiftFamily::StretchedSuperExponential: os << "(p=" << p << ")"; break;
    case ShiftFamily::DoubleExponential: os << "(a=" << a << ",B=" << base << ")"; break;
    case ShiftFamily::ExplicitTable: os << "(n=" << values.size() << ")"; break;
  }
  return os.str();
}

double shift_value(const ShiftModel& model, long long j) {
  if (j < 1) throw std::invalid_argument("shift_value: j must be >= 1");
  if (model.has_log_factor() && j < 2) {
    throw std::invalid_argument("shift_value: log-containing family is undefined at j = 1");
  }
  const double x = static_cast<double>(j);
  switch (model.family) {
    case ShiftFamily::Logarithmic: return model.eta / (x * std::log(x));
    case ShiftFamily::Polynomial: return model.eta / x;
    case ShiftFamily::LogPowerExponential:
      return model.eta * model.q * std::pow(std::log(x), model.q - 1.0) / x;
    case ShiftFamily::MildExponential: return model.eta * std::pow(x, -model.p);
    case ShiftFamily::StandardGeometric: return std::log(model.base);
    case ShiftFamily::StretchedSuperExponential: return std::pow(x, model.p);
    case ShiftFamily::DoubleExponential: return model.a * std::pow(model.base, x);
    case ShiftFamily::ExplicitTable:
      if (static_cast<std::size_t>(j) >= model.values.size()) {
        throw std::out_of_range("shift_value: index beyond explicit table");
      }
      return model.values[static_cast<std::size_t>(j)];
  }
  return kNaN;
}

double effective_shift(const ShiftModel& model, long long k) {
  if (k < 0) throw std::invalid_argument("effective_shift: k must be >= 0");
  if (model.family == ShiftFamily::ExplicitTable) {
    if (static_cast<std::size_t>(k) >= model.values.size()) {
      throw std::out_of_range("effective_shift: index beyond explicit table");
    }
    return model.values[static_cast<std::size_t>(k)];
  }
  return shift_value(model, std::max<long long>(k, model.first_formula_index()));
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Shrinking: return "shrinking";
    case Regime::Stable: return "stable";
    case Regime::Spreading: return "spreading";
    case Regime::Undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string_view convergence_name(Convergence c) {
  switch (c) {
    case Convergence::TotallyConvergent: return "totally_convergent";
    case Convergence::Divergent: return "divergent";
    case Convergence::NotApplicable: return "not_applicable";
  }
  return "not_applicable";
}

ScaleSequence::ScaleSequence(std::vector<double> log_centers) : log_s_(std::move(log_centers)) {
  require(log_s_.size() >= 2, "scale sequence needs at least S_0 and S_1");
  require(log_s_.front() == 0.0, "scale sequence must start at S_0 = 1");
  for (std::size_t j = 1; j < log_s_.size(); ++j) {
    require(std::isfinite(log_s_[j]) && log_s_[j] > log_s_[j - 1],
            "scale centers must be finite and strictly increasing");
  }
}

ScaleSequence ScaleSequence::from_centers(const std::vector<double>& centers) {
  require(!centers.empty() && centers.front() == 1.0, "explicit centers must start at S_0 = 1");
  std::vector<double> logs;
  logs.reserve(centers.size());
  for (double s : centers) {
    require(std::isfinite(s) && s > 0.0, "explicit centers must be finite and positive");
    logs.push_back(std::log(s));
  }
  logs.front() = 0.0;
  ScaleSequence seq(std::move(logs));
  const int J = seq.last_index();
  if (J >= 16) {
    const Regime r = classify_regime(seq);
    seq.set_classification(r, classify_convergence(seq, r));
  }
  return seq;
}

void ScaleSequence::check_index(int j, int lo, int hi, const char* what) const {
  if (j < lo || j > hi) {
    throw std::out_of_range(std::string(what) + ": index " + std::to_string(j) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

double ScaleSequence::center(int j) const {
  check_index(j, 0, last_index(), "center");
  return std::exp(log_s_[static_cast<std::size_t>(j)]);
}

double ScaleSequence::log_center(int j) const {
  check_index(j, 0, last_index(), "log_center");
  return log_s_[static_cast<std::size_t>(j)];
}

std::vector<double> ScaleSequence::centers() const {
  std::vector<double> s(log_s_.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = std::exp(log_s_[j]);
  return s;
}

double ScaleSequence::dilation_factor(int j) const {
  check_index(j, 0, last_index() - 1, "dilation_factor");
  const auto i = static_cast<std::size_t>(j);
  return std::exp(log_s_[i + 1] - log_s_[i]);
}

double ScaleSequence::bandwidth_ratio(int j) const {
  check_index(j, 1, last_index() - 1, "bandwidth_ratio");
  const auto i = static_cast<std::size_t>(j);
  // (S_{j+1} - S_{j-1}) / S_j with the division folded into the exponents.
  const double up = log_s_[i + 1] - log_s_[i];
  const double down = log_s_[i] - log_s_[i - 1];
  return std::expm1(up) - std::expm1(-down);
}

double ScaleSequence::log_growth_index(int j) const {
  check_index(j, 1, last_index(), "log_growth_index");
  return log_s_[static_cast<std::size_t>(j)] / j;
}

double ScaleSequence::log_separation_ratio(int j, double beta) const {
  check_index(j, 1, last_index(), "separation_ratio");
  require(beta >= 0.0 && beta < 1.0, "separation_ratio: beta must lie in [0, 1)");
  const auto i = static_cast<std::size_t>(j);
  // log(S_j - S_{j-1}) - (1 - beta) log S_{j-1}
  return std::log(std::expm1(log_s_[i] - log_s_[i - 1])) + beta * log_s_[i - 1];
}

double ScaleSequence::separation_ratio(int j, double beta) const {
  return std::exp(log_separation_ratio(j, beta));
}

std::string ScaleSequence::to_csv() const {
  std::string out = "j,S,h,delta,L\n";
  const int J = last_index();
  for (int j = 0; j <= J; ++j) {
    csv::append_row(out, {csv::number(j), csv::number(center(j)),
                          j < J ? csv::number(dilation_factor(j)) : std::string{},
                          (j >= 1 && j < J) ? csv::number(bandwidth_ratio(j)) : std::string{},
                          j >= 1 ? csv::number(log_growth_index(j)) : std::string{}});
  }
  return out;
}

ScaleSequence build_scales(const ShiftModel& model, int J) {
  model.validate();
  require(J >= 3, "build_scales: J must be >= 3");
  if (model.family == ShiftFamily::ExplicitTable) {
    require(model.values.size() >= static_cast<std::size_t>(J),
            "build_scales: explicit table shorter than J");
  }
  std::vector<double> logs{0.0};
  logs.reserve(static_cast<std::size_t>(J) + 1);
  CompensatedSum acc;
  bool truncated = false;
  for (int j = 1; j <= J; ++j) {
    acc.add(effective_shift(model, j - 1));
    const double v = acc.value();
    if (!(v <= kMaxLogCenter)) {
      truncated = true;
      break;
    }
    logs.push_back(v);
  }
  ScaleSequence seq(std::move(logs));
  seq.set_provenance(model, truncated);
  Regime r = Regime::Undetermined;
  if (seq.last_index() >= 16) r = classify_regime(seq);
  seq.set_classification(r, classify_convergence(seq, r));
  return seq;
}

Regime classify_regime(const ScaleSequence& seq, double tol) {
  const int J = seq.last_index();
  if (J < 16) throw std::invalid_argument("classify_regime: J must be >= 16");
  require(tol > 0.0 && tol < 1.0, "classify_regime: tol must lie in (0, 1)");

  std::vector<double> js, deltas;
  for (int j = std::max(1, J / 2); j <= J - 1; ++j) {
    js.push_back(static_cast<double>(j));
    deltas.push_back(seq.bandwidth_ratio(j));
  }
  const std::size_t n = deltas.size();
  const double last = deltas.back();

  if (!std::isfinite(last)) return Regime::Spreading;

  bool nonincreasing = true, nondecreasing = true, convex = true;
  const double slack = 1e-12;
  for (std::size_t i = 1; i < n; ++i) {
    if (deltas[i] > deltas[i - 1] * (1.0 + slack)) nonincreasing = false;
    if (deltas[i] < deltas[i - 1] * (1.0 - slack)) nondecreasing = false;
    if (i + 1 < n && deltas[i + 1] - 2.0 * deltas[i] + deltas[i - 1] < 0.0) convex = false;
  }
  const auto [mn, mx] = std::minmax_element(deltas.begin(), deltas.end());
  double mean = 0.0;
  for (double d : deltas) mean += d;
  mean /= static_cast<double>(n);
  const double rel_variation = (*mx - *mn) / mean;

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n; ++i) {
    lx.push_back(std::log(js[i]));
    ly.push_back(std::log(deltas[i]));
  }
  const double slope = least_squares_slope(lx, ly);

  const bool stable = rel_variation < tol;
  const bool shrinking = !stable && nonincreasing && (last < tol || slope < -2.0 * tol);
  const bool spreading =
      !stable && nondecreasing && (last > 1.0 / tol || (convex && slope > 2.0 * tol));

  const int votes = int(stable) + int(shrinking) + int(spreading);
  if (votes != 1) return Regime::Undetermined;
  if (stable) return Regime::Stable;
  return shrinking ? Regime::Shrinking : Regime::Spreading;
}

Convergence classify_convergence(const ScaleSequence& seq, Regime regime, double tol) {
  if (regime != Regime::Shrinking) return Convergence::NotApplicable;
  const auto& model = seq.model();
  if (model && model->family != ShiftFamily::ExplicitTable) {
    const double p = model->regularity_index();
    return p < -1.0 ? Convergence::TotallyConvergent : Convergence::Divergent;
  }
  const int J = seq.last_index();
  const double sj = seq.center(J);
  const double half = seq.center(J / 2);
  return std::abs(sj - half) / sj < tol ? Convergence::TotallyConvergent : Convergence::Divergent;
}

double closed_form_scale(const ShiftModel& model, double j) {
  require(j > 1.0, "closed_form_scale: j must be > 1");
  const double lj = std::log(j);
  switch (model.family) {
    case ShiftFamily::Logarithmic: return std::pow(lj, model.eta);
    case ShiftFamily::Polynomial: return std::pow(j, model.eta);
    case ShiftFamily::LogPowerExponential: return std::exp(model.eta * std::pow(lj, model.q));
    case ShiftFamily::MildExponential:
      return std::exp(model.eta * std::pow(j, 1.0 - model.p) / (1.0 - model.p));
    case ShiftFamily::StandardGeometric: return std::exp(std::log(model.base) * j);
    case ShiftFamily::StretchedSuperExponential:
      return std::exp(std::pow(j, model.p + 1.0) / (model.p + 1.0));
    case ShiftFamily::DoubleExponential:
      return std::exp(model.a * (std::pow(model.base, j) - 1.0) / (model.base - 1.0));
    case ShiftFamily::ExplicitTable:
      throw std::invalid_argument("closed_form_scale: explicit tables have no closed form");
  }
  return kNaN;
}

SeparationCheck separation_threshold_check(const ShiftModel& model, double beta, long long horizon) {
  model.validate();
  require(beta >= 0.0 && beta < 1.0, "separation_threshold_check: beta must lie in [0, 1)");
  require(horizon >= 2, "separation_threshold_check: horizon must be >= 2");
  if (model.family == ShiftFamily::ExplicitTable) {
    horizon = std::min<long long>(horizon, static_cast<long long>(model.values.size()));
  }
  SeparationCheck out;
  out.horizon = horizon;
  CompensatedSum log_prev;  // log S_{j-1}
  long long last_failure = 0;
  for (long long j = 1; j <= horizon; ++j) {
    const double eps = effective_shift(model, j - 1);
    const double log_r = std::log(std::expm1(eps)) + beta * log_prev.value();
    if (!(log_r > 0.0)) last_failure = j;
    out.final_log_ratio = log_r;
    log_prev.add(eps);
  }
  if (last_failure < horizon) out.satisfied_from = last_failure + 1;
  return out;
}

double localization_rate(const ShiftModel& model, double j) {
  require(j > 1.0, "localization_rate: j must be > 1");
  const double lj = std::log(j);
  switch (model.family) {
    case ShiftFamily::MildExponential: {
      const double p = model.regularity_index();  // in (-1, 0)
      const double gamma = model.eta;
      return gamma * std::pow(j, p) * std::exp(std::pow(j, p + 1.0) * gamma / (p + 1.0));
    }
    case ShiftFamily::Polynomial:
      return model.eta * std::exp(lj * model.eta);
    case ShiftFamily::LogPowerExponential: {
      const double gamma = model.eta * model.q * std::pow(lj, model.q - 1.0);
      return gamma * std::exp(lj * gamma);
    }
    case ShiftFamily::Logarithmic:
      if (model.eta <= 1.0) {
        throw std::invalid_argument("localization_rate: logarithmic family requires eta > 1");
      }
      return model.eta * std::pow(lj, model.eta - 1.0);
    default:
      throw std::invalid_argument("localization_rate: only shrinking families with index in [-1, 0)");
  }
}

}  // namespace flexneedlet
