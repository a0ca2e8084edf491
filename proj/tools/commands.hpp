#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace flexneedlet::cli {

/// Files produced by a command, kept in memory until the run succeeds.
struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;
  Json config;   // fully resolved configuration
  Json summary;  // headline numbers echoed into the manifest
};

/// Largest level bandlimit the commands accept.
inline constexpr int kMaxBandlimit = 2048;

const std::vector<std::string>& command_names();

/// Runs a subcommand on the root configuration object. `seed` overrides the
/// configured seed when set.
CommandOutput run_command(const std::string& name, const ConfigNode& root, std::optional<std::uint64_t> seed);

}  // namespace flexneedlet::cli
