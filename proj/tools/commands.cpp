#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "flexneedlet/csv.hpp"
#include "flexneedlet/gof_test.hpp"
#include "flexneedlet/needlet_frame.hpp"
#include "flexneedlet/random_field.hpp"
#include "flexneedlet/scale_engine.hpp"
#include "flexneedlet/window_builder.hpp"
#include "svg.hpp"

namespace flexneedlet::cli {

namespace {

constexpr int kClassifyLevels = 64;

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<ShiftModel> parse_shifts(const ConfigNode& root, const std::string& key,
                                     const std::vector<ShiftModel>& fallback) {
  if (!root.has(key)) return fallback;
  std::vector<ShiftModel> out;
  for (const auto& node : root.objects(key)) out.push_back(parse_shift(node));
  if (out.empty()) root.fail(key, "field '" + key + "' must list at least one shift model");
  return out;
}

ShiftModel parse_one_shift(const ConfigNode& root, const std::string& key, const ShiftModel& fallback) {
  return root.has(key) ? parse_shift(root.object(key)) : fallback;
}

SpectrumModel parse_one_spectrum(const ConfigNode& root, const std::string& key, const SpectrumModel& fallback) {
  return root.has(key) ? parse_spectrum(root.object(key)) : fallback;
}

int bounded(const ConfigNode& root, const std::string& key, int fallback, int lo, int hi) {
  const int v = root.integer(key, fallback);
  if (v < lo || v > hi) {
    root.fail(key, "field '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

Json shifts_json(const std::vector<ShiftModel>& models) {
  Json a = Json::array();
  for (const auto& m : models) a.push_back(to_json(m));
  return a;
}

// Level j of a system needs S_{j+1}; build enough centers and check the grid size.
void require_level(const ScaleSequence& scales, int j, const std::string& what) {
  if (j + 1 > scales.last_index()) {
    throw std::range_error(what + ": level " + std::to_string(j) + " needs S_" + std::to_string(j + 1) +
                           ", which is not representable");
  }
  if (!(std::ceil(scales.center(j + 1)) <= kMaxBandlimit / 2)) {
    throw std::range_error(what + ": level " + std::to_string(j) + " needs bandlimit 2 ceil(S_{j+1}) = " +
                           csv::number(2.0 * std::ceil(scales.center(j + 1))) + " > " +
                           std::to_string(kMaxBandlimit));
  }
}

std::vector<double> theta_grid(int n) {
  std::vector<double> theta(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) theta[static_cast<std::size_t>(i)] = kPi * (i + 1) / n;
  return theta;
}

// ---------------------------------------------------------------- regimes

CommandOutput cmd_regimes(const ConfigNode& root) {
  const auto families = parse_shifts(root, "families",
                                     {ShiftModel::polynomial(2.0), ShiftModel::standard_geometric(2.0),
                                      ShiftModel::stretched_super_exponential(0.5)});
  const int J = bounded(root, "J", kClassifyLevels, 16, 100000);
  root.finish();

  CommandOutput out;
  out.config = {{"families", shifts_json(families)}, {"J", J}};
  std::string data = "family,j,S,log_S,delta,L,regime\n";
  std::string table = "family,label,regime,convergence,levels\n";
  svg::Panel ps{"Scaling sequence", "j", "log S_j", false, false, {}};
  svg::Panel pd{"Relative bandwidth ratio", "j", "Delta_j", false, true, {}};
  svg::Panel pl{"Logarithmic growth index", "j", "L_j", false, false, {}};
  out.summary = Json::array();
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& m = families[f];
    if (m.family == ShiftFamily::ExplicitTable && m.values.size() < static_cast<std::size_t>(J)) {
      root.fail("families/" + std::to_string(f), "explicit table needs at least J = " + std::to_string(J) + " shifts");
    }
    const ScaleSequence seq = build_scales(m, J);
    const std::string regime(regime_name(seq.regime()));
    const int last = seq.last_index();
    svg::Series ss{m.label(), {}, {}}, sd{m.label(), {}, {}}, sl{m.label(), {}, {}};
    for (int j = 0; j <= last; ++j) {
      const double delta = (j >= 1 && j < last) ? seq.bandwidth_ratio(j) : std::nan("");
      const double L = j >= 1 ? seq.log_growth_index(j) : std::nan("");
      csv::append_row(data, {csv::number(f), csv::number(j), csv::number(seq.center(j)),
                             csv::number(seq.log_center(j)), csv::number(delta), csv::number(L), regime});
      ss.x.push_back(j);
      ss.y.push_back(seq.log_center(j));
      sd.x.push_back(j);
      sd.y.push_back(delta);
      sl.x.push_back(j);
      sl.y.push_back(L);
    }
    csv::append_row(table, {csv::number(f), quoted(m.label()), regime,
                            std::string(convergence_name(seq.convergence())), csv::number(last)});
    out.summary.push_back({{"family", m.label()}, {"regime", regime}});
    // Tables carry no closed form; they are reported in the CSVs only.
    if (m.family == ShiftFamily::ExplicitTable) continue;
    ps.series.push_back(std::move(ss));
    pd.series.push_back(std::move(sd));
    pl.series.push_back(std::move(sl));
  }
  out.files.emplace_back("regimes.csv", std::move(data));
  out.files.emplace_back("regimes_summary.csv", std::move(table));
  out.files.emplace_back("regimes.svg", svg::render({ps, pd, pl}));
  return out;
}

// ---------------------------------------------------------------- scales

CommandOutput cmd_scales(const ConfigNode& root) {
  const ShiftModel m = parse_one_shift(root, "shift", ShiftModel::standard_geometric(2.0));
  const int J = bounded(root, "J", 16, 3, 100000);
  root.finish();
  const ScaleSequence seq = build_scales(m, J);
  CommandOutput out;
  out.config = {{"shift", to_json(m)}, {"J", J}};
  out.summary = {{"regime", regime_name(seq.regime())},
                 {"convergence", convergence_name(seq.convergence())},
                 {"levels", seq.last_index()},
                 {"truncated", seq.truncated()}};
  svg::Series s{m.label(), {}, {}};
  for (int j = 0; j <= seq.last_index(); ++j) {
    s.x.push_back(j);
    s.y.push_back(seq.log_center(j));
  }
  out.files.emplace_back("scales.csv", seq.to_csv());
  out.files.emplace_back("scales.svg", svg::render({{"Scaling sequence", "j", "log S_j", false, false, {s}}}));
  return out;
}

// ---------------------------------------------------------------- windows

CommandOutput cmd_windows(const ConfigNode& root) {
  const ShiftModel m = parse_one_shift(root, "shift", ShiftModel::standard_geometric(2.0));
  const int J = bounded(root, "J", 8, 3, 64);
  const std::string mode_name = root.string("mode", "per_level");
  WindowMode mode = WindowMode::PerLevel;
  if (mode_name == "template") {
    mode = WindowMode::Template;
  } else if (mode_name != "per_level") {
    root.fail("mode", "field 'mode' must be per_level or template");
  }
  const int samples = bounded(root, "samples", 2000, 16, 1000000);
  root.finish();
  const WindowSystem ws(build_scales(m, J), mode);
  const ScaleSequence& seq = ws.scales();
  if (seq.last_index() < J) throw std::range_error("windows: centers overflow before level J");
  const double top = seq.center(J - 1);
  if (!(top <= 1e12)) throw std::range_error("windows: S_{J-1} too large to sample");

  CommandOutput out;
  out.config = {{"shift", to_json(m)}, {"J", J}, {"mode", mode_name}, {"samples", samples}};

  // Log-spaced abscissae on [1/2, S_{J-1}] plus every integer multipole up
  // to S_{J-1} when there are few enough of them.
  std::vector<double> u;
  const double lo = std::log(0.5), hi = std::log(top);
  for (int i = 0; i < samples; ++i) u.push_back(std::exp(lo + (hi - lo) * i / (samples - 1)));
  if (top <= 100000.0) {
    for (double l = 1.0; l <= top; l += 1.0) u.push_back(l);
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());

  std::string header = "u";
  for (int j = 0; j < J; ++j) header += ",b_" + std::to_string(j);
  std::string data = header + ",residual\n";
  std::vector<svg::Series> series(static_cast<std::size_t>(J));
  double worst = 0.0;
  for (int j = 0; j < J; ++j) series[static_cast<std::size_t>(j)].name = "b_" + std::to_string(j) + "^2";
  for (double x : u) {
    std::vector<std::string> row{csv::number(x)};
    for (int j = 0; j < J; ++j) {
      const double b = ws.weight(j, x);
      row.push_back(csv::number(b));
      series[static_cast<std::size_t>(j)].x.push_back(x);
      series[static_cast<std::size_t>(j)].y.push_back(b * b);
    }
    const double r = std::abs(ws.partition_sum(x) - 1.0);
    worst = std::max(worst, r);
    row.push_back(csv::number(r));
    csv::append_row(data, row);
  }
  out.summary = {{"max_residual", worst}, {"S_J-1", top}};
  out.files.emplace_back("windows.csv", std::move(data));
  out.files.emplace_back("scales.csv", seq.to_csv());
  out.files.emplace_back("windows.svg",
                         svg::render({{"Weight functions " + m.label(), "multipole u", "b_j(u)^2", true, false,
                                       std::move(series)}},
                                     720, 360));
  return out;
}

// ---------------------------------------------------------------- localization

CommandOutput cmd_localization(const ConfigNode& root) {
  const auto exemplars = parse_shifts(root, "exemplars",
                                      {ShiftModel::polynomial(0.5), ShiftModel::standard_geometric(2.0),
                                       ShiftModel::stretched_super_exponential(0.5)});
  const int level = bounded(root, "level", 2, 1, 1000);
  const int samples = bounded(root, "samples", 2000, 16, 200000);
  const double width_fraction = root.number("width_fraction", 0.1);
  if (!(width_fraction > 0.0 && width_fraction < 1.0)) root.fail("width_fraction", "must lie in (0, 1)");
  root.finish();

  CommandOutput out;
  out.config = {{"exemplars", shifts_json(exemplars)},
                {"level", level},
                {"samples", samples},
                {"width_fraction", width_fraction}};
  const auto theta = theta_grid(samples);
  std::vector<LocalizationProfile> profiles;
  std::string table = "exemplar,label,regime,main_lobe,width,envelope_monotone,m_hat_lower,m_hat_gap\n";
  svg::Panel panel{"Needlet decay at j = " + std::to_string(level), "theta", "|psi| / |psi(0)|", false, true, {}};
  out.summary = Json::array();
  for (std::size_t e = 0; e < exemplars.size(); ++e) {
    const auto& m = exemplars[e];
    const ScaleSequence seq = build_scales(m, std::max(level + 2, 3));
    require_level(seq, level, "localization");
    const NeedletSystem sys{WindowSystem(seq)};
    const auto prof = localization_profile(sys, level, representative_point(sys, level), theta);
    const double sj = seq.center(level);
    const double fit_hi = std::min(kPi, 50.0 / sj);
    const double fit_lo = std::min(5.0 / sj, 0.5 * fit_hi);
    const auto fits = fit_localization(sys, prof, fit_lo, fit_hi);
    const std::string regime(
        regime_name(m.family == ShiftFamily::ExplicitTable ? seq.regime() : build_scales(m, kClassifyLevels).regime()));
    const double width = envelope_width(prof, width_fraction);
    const bool mono = envelope_monotone(prof);
    csv::append_row(table, {csv::number(e), quoted(m.label()), regime, csv::number(main_lobe_radius(prof)),
                            csv::number(width), std::string(mono ? "true" : "false"), csv::number(fits.lower_scale.exponent),
                            csv::number(fits.gap_scale.exponent)});
    out.summary.push_back({{"exemplar", m.label()}, {"regime", regime}, {"width", width}, {"envelope_monotone", mono}});
    svg::Series s{m.label() + " (" + regime + ")", theta, {}};
    const double peak = prof.abs_psi.front();
    for (double a : prof.abs_psi) s.y.push_back(a / peak);
    panel.series.push_back(std::move(s));
    profiles.push_back(prof);
  }
  std::string header = "theta";
  for (std::size_t e = 0; e < exemplars.size(); ++e) {
    header += ",abs_psi_" + std::to_string(e) + ",envelope_" + std::to_string(e);
  }
  std::string data = header + "\n";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    std::vector<std::string> row{csv::number(theta[i])};
    for (const auto& p : profiles) {
      row.push_back(csv::number(p.abs_psi[i]));
      row.push_back(csv::number(p.envelope[i]));
    }
    csv::append_row(data, row);
  }
  out.files.emplace_back("localization.csv", std::move(data));
  out.files.emplace_back("localization_summary.csv", std::move(table));
  out.files.emplace_back("localization.svg", svg::render({panel}, 720, 380));
  return out;
}

// ---------------------------------------------------------------- correlation

CommandOutput cmd_correlation(const ConfigNode& root, std::uint64_t seed) {
  const auto shifts = parse_shifts(root, "shifts",
                                   {ShiftModel::logarithmic(1.0), ShiftModel::mild_exponential(1.0, 0.5)});
  const SpectrumModel spectrum =
      parse_one_spectrum(root, "spectrum", SpectrumModel::modulated_sine(2.0, {SineTerm{}}));
  const int level = bounded(root, "level", 4, 1, 1000);
  const double beta = root.number("beta", spectrum.beta_smoothness);
  if (!(beta >= 0.0 && beta < 1.0)) root.fail("beta", "field 'beta' must lie in [0, 1)");
  const int max_pairs = bounded(root, "max_pairs", 4000, 1, 1000000);
  root.finish();

  CommandOutput out;
  out.config = {{"shifts", shifts_json(shifts)}, {"spectrum", to_json(spectrum)}, {"level", level},
                {"beta", beta},          {"max_pairs", max_pairs},            {"seed", seed}};
  std::string table = "shift,label,beta,satisfied_from,log_R_horizon,verdict,decay_scale\n";
  svg::Panel panel{"Coefficient correlation at j = " + std::to_string(level), "theta", "|Corr|", false, true, {}};
  out.summary = Json::array();
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    const auto& m = shifts[s];
    const auto chk = separation_threshold_check(m, beta);
    const ScaleSequence seq = build_scales(m, std::max(level + 2, 3));
    require_level(seq, level, "correlation");
    const NeedletSystem sys{WindowSystem(seq)};
    const auto& grid = sys.grid(level);
    const std::size_t k0 = representative_point(sys, level);
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (k != k0) others.push_back(k);
    }
    if (others.size() > static_cast<std::size_t>(max_pairs)) {
      std::mt19937_64 rng(derive_seed(seed, 0xc0de, s));
      std::shuffle(others.begin(), others.end(), rng);
      others.resize(static_cast<std::size_t>(max_pairs));
      std::sort(others.begin(), others.end());
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k : others) pairs.emplace_back(k0, k);
    const auto rows = correlation_decay_profile(sys, spectrum, level, pairs);
    const std::string verdict = chk.satisfied_from ? "pass" : "fail";
    const double scale = correlation_decay_scale(seq, level, beta);
    csv::append_row(table, {csv::number(s), quoted(m.label()), csv::number(beta),
                            chk.satisfied_from ? csv::number(static_cast<long long>(*chk.satisfied_from)) : "",
                            csv::number(chk.final_log_ratio), verdict, csv::number(scale)});
    out.summary.push_back({{"shift", m.label()}, {"separation", verdict}});
    out.files.emplace_back("correlation_" + std::to_string(s) + ".csv", correlation_csv(rows));
    svg::Series series{m.label() + " (" + verdict + ")", {}, {}};
    for (const auto& r : rows) {
      series.x.push_back(r.theta);
      series.y.push_back(r.corr_analytic);
    }
    panel.series.push_back(std::move(series));
  }
  out.files.emplace_back("correlation_summary.csv", std::move(table));
  out.files.emplace_back("correlation.svg", svg::render({panel}, 720, 380));
  return out;
}

// ---------------------------------------------------------------- gof

CommandOutput cmd_gof(const ConfigNode& root, std::uint64_t seed) {
  GofConfig config;
  config.shift = parse_one_shift(root, "shift", config.shift);
  config.spectrum = parse_one_spectrum(root, "spectrum", config.spectrum);
  config.levels = root.integers("levels", config.levels);
  config.eps_sep = root.number("eps_sep", config.eps_sep);
  config.replicates = bounded(root, "replicates", config.replicates, 2, 10000000);
  config.require_separation = root.boolean("require_separation", config.require_separation);
  config.seed = seed;
  root.finish();
  try {
    if (config.levels.empty()) throw std::invalid_argument("gof: no levels configured");
    if (!(config.eps_sep > 0.0)) throw std::invalid_argument("gof: eps_sep must be > 0");
    if (!(1.0 - config.spectrum.beta_smoothness - config.eps_sep > 0.0)) {
      throw std::invalid_argument("gof: need beta + eps_sep < 1");
    }
    for (int j : config.levels) {
      if (j < 1 || j > 1000) throw std::invalid_argument("gof: levels must lie in [1, 1000]");
    }
  } catch (const std::invalid_argument& e) {
    root.fail("", e.what());
  }

  CommandOutput out;
  out.config = {{"shift", to_json(config.shift)},
                {"spectrum", to_json(config.spectrum)},
                {"levels", config.levels},
                {"eps_sep", config.eps_sep},
                {"replicates", config.replicates},
                {"require_separation", config.require_separation},
                {"seed", seed}};
  const GofReport report = run_gof(config);
  svg::Panel ks{"Kolmogorov distance", "card(D_j)", "KS", true, true, {}};
  svg::Panel z{"Moment checks", "level j", "z score", false, false, {}};
  svg::Series sk{"KS", {}, {}}, zm{"mean / SE", {}, {}}, zv{"(var - exact) / SE", {}, {}};
  for (const auto& l : report.levels) {
    sk.x.push_back(static_cast<double>(l.card));
    sk.y.push_back(l.ks);
    zm.x.push_back(l.level);
    zm.y.push_back(l.mean / l.mean_se);
    zv.x.push_back(l.level);
    zv.y.push_back((l.variance - l.exact_variance) / l.variance_se);
  }
  ks.series.push_back(std::move(sk));
  z.series.push_back(std::move(zm));
  z.series.push_back(std::move(zv));
  out.summary = Json::parse(report.to_json());
  out.files.emplace_back("gof_report.json", report.to_json());
  out.files.emplace_back("gof.csv", report.to_csv());
  out.files.emplace_back("gof.svg", svg::render({ks, z}));
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"regimes", "windows", "localization", "correlation", "gof", "scales"};
  return names;
}

CommandOutput run_command(const std::string& name, const ConfigNode& root, std::optional<std::uint64_t> seed) {
  if (root.has("command")) {
    const std::string declared = root.string("command");
    if (declared != name) root.fail("command", "configuration is for '" + declared + "', not '" + name + "'");
  }
  const std::uint64_t resolved_seed = seed ? *seed : root.unsigned_integer("seed", 1);
  if (seed) root.unsigned_integer("seed", 1);  // still type-checked

  CommandOutput out;
  if (name == "regimes") {
    out = cmd_regimes(root);
  } else if (name == "scales") {
    out = cmd_scales(root);
  } else if (name == "windows") {
    out = cmd_windows(root);
  } else if (name == "localization") {
    out = cmd_localization(root);
  } else if (name == "correlation") {
    out = cmd_correlation(root, resolved_seed);
  } else if (name == "gof") {
    out = cmd_gof(root, resolved_seed);
  } else {
    throw ConfigError("unknown command '" + name + "'");
  }
  root.finish();
  out.config["seed"] = resolved_seed;
  return out;
}

}  // namespace flexneedlet::cli
