#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flexneedlet::cli {

namespace {

struct Frame {
  bool object = false;
  std::string pointer;
  std::string key;
  int index = 0;
  bool expect_key = false;
  bool element_seen = false;
};

std::string kind_of(const Json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "a boolean";
  if (v.is_number()) return "a number";
  if (v.is_string()) return "a string";
  if (v.is_array()) return "an array";
  return "an object";
}

}  // namespace

std::map<std::string, int> locate_lines(const std::string& text) {
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;
  auto value_pointer = [&]() -> std::string {
    if (stack.empty()) return "";
    const Frame& f = stack.back();
    return f.object ? f.pointer + "/" + f.key : f.pointer + "/" + std::to_string(f.index);
  };
  auto start_value = [&] {
    if (!stack.empty() && !stack.back().object && !stack.back().element_seen) {
      lines.emplace(value_pointer(), line);
      stack.back().element_seen = true;
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      const int start = line;
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        if (text[i] == '\n') ++line;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        lines.emplace(stack.back().pointer + "/" + s, start);
      } else {
        start_value();
      }
    } else if (c == '{' || c == '[') {
      start_value();
      Frame f;
      f.object = c == '{';
      f.pointer = value_pointer();
      f.expect_key = f.object;
      if (stack.empty()) lines.emplace("", line);
      stack.push_back(f);
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',') {
      if (!stack.empty()) {
        Frame& f = stack.back();
        if (f.object) {
          f.expect_key = true;
        } else {
          ++f.index;
          f.element_seen = false;
        }
      }
    } else if (c != ':' && c != ' ' && c != '\t' && c != '\r') {
      start_value();
    }
  }
  return lines;
}

ConfigSource ConfigSource::parse(const std::string& text, const std::string& name) {
  ConfigSource src;
  src.name = name;
  try {
    src.root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(name + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  if (!src.root.is_object()) throw ConfigError(name + ":1: configuration must be a JSON object");
  src.lines = locate_lines(text);
  return src;
}

ConfigSource ConfigSource::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

ConfigSource ConfigSource::empty() {
  ConfigSource src;
  src.name = "<defaults>";
  src.root = Json::object();
  return src;
}

int ConfigSource::line(const std::string& pointer) const {
  std::string p = pointer;
  for (;;) {
    const auto it = lines.find(p);
    if (it != lines.end()) return it->second;
    const auto cut = p.rfind('/');
    if (cut == std::string::npos) return 0;
    p.erase(cut);
  }
}

void ConfigSource::fail(const std::string& pointer, const std::string& message) const {
  const int l = line(pointer);
  const std::string where = l > 0 ? name + ":" + std::to_string(l) : name;
  const std::string field = pointer.empty() ? "" : " (" + pointer + ")";
  throw ConfigError(where + ": " + message + field);
}

ConfigNode::ConfigNode(const ConfigSource& src, const Json& value, std::string pointer)
    : src_(&src), value_(&value), pointer_(std::move(pointer)), used_(std::make_shared<std::set<std::string>>()) {
  if (!value.is_object()) src.fail(pointer_, "expected an object, found " + kind_of(value));
}

bool ConfigNode::has(const std::string& key) const { return value_->contains(key); }

const Json* ConfigNode::field(const std::string& key) const {
  used_->insert(key);
  const auto it = value_->find(key);
  if (it == value_->end() || it->is_null()) return nullptr;
  return &*it;
}

void ConfigNode::fail(const std::string& key, const std::string& message) const {
  src_->fail(key.empty() ? pointer_ : child_pointer(key), message);
}

double ConfigNode::number(const std::string& key, std::optional<double> fallback) const {
  const Json* v = field(key);
  if (!v) {
    if (!fallback) fail(key, "missing required field '" + key + "'");
    return *fallback;
  }
  if (!v->is_number()) fail(key, "field '" + key + "' must be a number, found " + kind_of(*v));
  return v->get<double>();
}

std::optional<double> ConfigNode::optional_number(const std::string& key) const {
  if (!field(key)) return std::nullopt;
  return number(key);
}

int ConfigNode::integer(const std::string& key, std::optional<int> fallback) const {
  const Json* v = field(key);
  if (!v) {
    if (!fallback) fail(key, "missing required field '" + key + "'");
    return *fallback;
  }
  if (!v->is_number_integer()) fail(key, "field '" + key + "' must be an integer, found " + kind_of(*v));
  const auto n = v->get<long long>();
  if (n < -1000000000LL || n > 1000000000LL) fail(key, "field '" + key + "' is out of range");
  return static_cast<int>(n);
}

std::uint64_t ConfigNode::unsigned_integer(const std::string& key, std::uint64_t fallback) const {
  const Json* v = field(key);
  if (!v) return fallback;
  if (!v->is_number_unsigned()) fail(key, "field '" + key + "' must be a nonnegative integer");
  return v->get<std::uint64_t>();
}

bool ConfigNode::boolean(const std::string& key, bool fallback) const {
  const Json* v = field(key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(key, "field '" + key + "' must be a boolean, found " + kind_of(*v));
  return v->get<bool>();
}

std::string ConfigNode::string(const std::string& key, std::optional<std::string> fallback) const {
  const Json* v = field(key);
  if (!v) {
    if (!fallback) fail(key, "missing required field '" + key + "'");
    return *fallback;
  }
  if (!v->is_string()) fail(key, "field '" + key + "' must be a string, found " + kind_of(*v));
  return v->get<std::string>();
}

std::vector<double> ConfigNode::numbers(const std::string& key) const {
  const Json* v = field(key);
  if (!v) fail(key, "missing required field '" + key + "'");
  if (!v->is_array()) fail(key, "field '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) src_->fail(child_pointer(key) + "/" + std::to_string(i), "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

std::vector<int> ConfigNode::integers(const std::string& key, std::vector<int> fallback) const {
  const Json* v = field(key);
  if (!v) return fallback;
  if (!v->is_array()) fail(key, "field '" + key + "' must be an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto& e = (*v)[i];
    if (!e.is_number_integer() || std::abs(e.get<long long>()) > 1000000000LL) {
      src_->fail(child_pointer(key) + "/" + std::to_string(i), "expected an integer");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

ConfigNode ConfigNode::object(const std::string& key) const {
  const Json* v = field(key);
  if (!v) fail(key, "missing required field '" + key + "'");
  return ConfigNode(*src_, *v, child_pointer(key));
}

std::vector<ConfigNode> ConfigNode::objects(const std::string& key) const {
  const Json* v = field(key);
  if (!v) fail(key, "missing required field '" + key + "'");
  if (!v->is_array()) fail(key, "field '" + key + "' must be an array of objects");
  std::vector<ConfigNode> out;
  for (std::size_t i = 0; i < v->size(); ++i) out.emplace_back(*src_, (*v)[i], child_pointer(key) + "/" + std::to_string(i));
  return out;
}

void ConfigNode::finish() const {
  for (const auto& [key, value] : value_->items()) {
    if (!used_->count(key)) fail(key, "unknown field '" + key + "'");
  }
}

ShiftModel parse_shift(const ConfigNode& node) {
  ShiftFamily family{};
  const std::string name = node.string("family");
  try {
    family = parse_family(name);
  } catch (const std::invalid_argument& e) {
    node.fail("family", e.what());
  }
  ShiftModel m;
  try {
    switch (family) {
      case ShiftFamily::Logarithmic: m = ShiftModel::logarithmic(node.number("eta")); break;
      case ShiftFamily::Polynomial: m = ShiftModel::polynomial(node.number("eta")); break;
      case ShiftFamily::LogPowerExponential:
        m = ShiftModel::log_power_exponential(node.number("eta"), node.number("q"));
        break;
      case ShiftFamily::MildExponential: m = ShiftModel::mild_exponential(node.number("eta"), node.number("p")); break;
      case ShiftFamily::StandardGeometric: m = ShiftModel::standard_geometric(node.number("B")); break;
      case ShiftFamily::StretchedSuperExponential: m = ShiftModel::stretched_super_exponential(node.number("p")); break;
      case ShiftFamily::DoubleExponential: m = ShiftModel::double_exponential(node.number("a"), node.number("B")); break;
      case ShiftFamily::ExplicitTable: m = ShiftModel::explicit_table(node.numbers("shifts")); break;
    }
  } catch (const std::invalid_argument& e) {
    node.fail("", e.what());
  }
  node.finish();
  return m;
}

SpectrumModel parse_spectrum(const ConfigNode& node) {
  const std::string type = node.string("type");
  const double alpha = node.number("alpha", 2.0);
  SpectrumModel m;
  try {
    if (type == "unit") {
      m = SpectrumModel::unit(alpha, node.number("beta", 0.0));
    } else if (type == "modulated_sine") {
      std::vector<SineTerm> terms;
      if (node.has("terms")) {
        for (const auto& t : node.objects("terms")) {
          SineTerm term;
          term.c = t.number("c", term.c);
          term.d = t.number("d", term.d);
          term.M = t.number("M", term.M);
          term.beta = t.number("beta", term.beta);
          t.finish();
          terms.push_back(term);
        }
      } else {
        terms.emplace_back();
      }
      m = SpectrumModel::modulated_sine(alpha, terms);
    } else {
      node.fail("type", "unknown spectrum type '" + type + "' (expected unit or modulated_sine)");
    }
    m.validate();
  } catch (const std::invalid_argument& e) {
    node.fail("", e.what());
  }
  node.finish();
  return m;
}

Json to_json(const ShiftModel& m) {
  Json j;
  j["family"] = std::string(family_name(m.family));
  switch (m.family) {
    case ShiftFamily::Logarithmic:
    case ShiftFamily::Polynomial: j["eta"] = m.eta; break;
    case ShiftFamily::LogPowerExponential:
      j["eta"] = m.eta;
      j["q"] = m.q;
      break;
    case ShiftFamily::MildExponential:
      j["eta"] = m.eta;
      j["p"] = m.p;
      break;
    case ShiftFamily::StandardGeometric: j["B"] = m.base; break;
    case ShiftFamily::StretchedSuperExponential: j["p"] = m.p; break;
    case ShiftFamily::DoubleExponential:
      j["a"] = m.a;
      j["B"] = m.base;
      break;
    case ShiftFamily::ExplicitTable: j["shifts"] = m.values; break;
  }
  return j;
}

Json to_json(const SpectrumModel& m) {
  Json j;
  j["type"] = m.is_unit() ? "unit" : "modulated_sine";
  j["alpha"] = m.alpha;
  if (m.is_unit()) {
    j["beta"] = m.beta_smoothness;
  } else {
    j["terms"] = Json::array();
    for (const auto& t : m.terms) j["terms"].push_back({{"c", t.c}, {"d", t.d}, {"M", t.M}, {"beta", t.beta}});
  }
  return j;
}

}  // namespace flexneedlet::cli
