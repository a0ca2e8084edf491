#pragma once

// JSON experiment configuration with strict field checking. Every object
// read through ConfigNode must consume all of its fields; leftovers and type
// mismatches are reported with the line they appear on.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexneedlet/random_field.hpp"
#include "flexneedlet/scale_engine.hpp"

namespace flexneedlet::cli {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed document plus the source line of every object key and array
/// element, addressed by JSON pointer.
struct ConfigSource {
  std::string name;
  Json root;
  std::map<std::string, int> lines;

  static ConfigSource parse(const std::string& text, const std::string& name);
  static ConfigSource load(const std::string& path);
  static ConfigSource empty();

  /// Line of the pointer or of its closest located ancestor; 0 if unknown.
  int line(const std::string& pointer) const;
  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const;
};

/// JSON pointer -> source line for a JSON text.
std::map<std::string, int> locate_lines(const std::string& text);

class ConfigNode {
 public:
  ConfigNode(const ConfigSource& src, const Json& value, std::string pointer);

  const std::string& pointer() const { return pointer_; }
  bool has(const std::string& key) const;

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const;
  std::optional<double> optional_number(const std::string& key) const;
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) const;
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key, std::vector<int> fallback) const;

  ConfigNode object(const std::string& key) const;
  std::vector<ConfigNode> objects(const std::string& key) const;

  /// Fails on any field that was not read.
  void finish() const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const Json* field(const std::string& key) const;
  std::string child_pointer(const std::string& key) const { return pointer_ + "/" + key; }

  const ConfigSource* src_;
  const Json* value_;
  std::string pointer_;
  std::shared_ptr<std::set<std::string>> used_;
};

ShiftModel parse_shift(const ConfigNode& node);
SpectrumModel parse_spectrum(const ConfigNode& node);
Json to_json(const ShiftModel& model);
Json to_json(const SpectrumModel& model);

}  // namespace flexneedlet::cli
