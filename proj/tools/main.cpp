// flexneedlet: batch front end for the needlet experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical feasibility
// error, 4 internal invariant violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "flexneedlet/gof_test.hpp"
#include "flexneedlet/needlet_frame.hpp"
#include "flexneedlet/parallel.hpp"
#include "flexneedlet/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace flexneedlet;
using namespace flexneedlet::cli;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kFeasibilityError = 3, kInternalError = 4 };

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

// Writes every file, then the manifest. On any failure the files written so
// far are removed, along with the directory if this run created it.
void write_outputs(const fs::path& dir, const CommandOutput& result, const Json& manifest) {
  const bool created = !fs::exists(dir);
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& content) {
      const fs::path p = dir / name;
      written.push_back(p);
      std::ofstream f(p, std::ios::binary);
      f << content;
      f.close();
      if (!f) throw std::runtime_error("cannot write " + p.string());
    };
    for (const auto& [name, content] : result.files) put(name, content);
    put("manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    if (created) fs::remove(dir, ec);
    throw;
  }
}

int run(const std::string& command, const Options& opt) {
  const ConfigSource src = opt.config.empty() ? ConfigSource::empty() : ConfigSource::load(opt.config);
  const ConfigNode root(src, src.root, "");
  int threads = root.integer("threads", 0);
  if (threads < 0) root.fail("threads", "field 'threads' must be >= 0");
  if (opt.threads) threads = *opt.threads;
  set_thread_count(static_cast<unsigned>(threads));

  const CommandOutput result = run_command(command, root, opt.seed);

  Json manifest;
  manifest["command"] = command;
  manifest["config"] = result.config;
  manifest["config"]["threads"] = threads;
  manifest["config_file"] = opt.config;
  manifest["kernels"] = std::string(simd::isa_name(simd::active_isa()));
  manifest["outputs"] = Json::array();
  for (const auto& [name, content] : result.files) {
    manifest["outputs"].push_back({{"file", name}, {"bytes", content.size()}});
  }
  manifest["summary"] = result.summary;
  write_outputs(opt.out, result, manifest);
  std::cout << command << ": wrote " << result.files.size() + 1 << " files to " << opt.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible-bandwidth spherical needlet experiments"};
  app.require_subcommand(1, 1);
  Options opt;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { opt.seed = s; },
                                            "Random seed (overrides the configuration)");
    sub->add_option_function<int>("--threads", [&](const int& n) { opt.threads = n; },
                                  "Worker threads, 0 for all cores")
        ->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GofInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kFeasibilityError;
  } catch (const CoverageError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kFeasibilityError;
  } catch (const std::range_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kFeasibilityError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
