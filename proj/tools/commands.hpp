#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vcx/manifest.hpp"

namespace vcx::cli {

/// Bad flags or settings; mapped to exit code 2. Data problems surface as
/// vcx::Error and map to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::optional<std::filesystem::path> config;
  std::string command_line;

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
  /// --jobs, or the hardware concurrency when unset.
  int job_count() const;
};

/// Each register function adds its subcommands and their callbacks.
void register_metrics(CLI::App& app, GlobalOptions& g);
void register_rank(CLI::App& app, GlobalOptions& g);
void register_study(CLI::App& app, GlobalOptions& g);
void register_attribute(CLI::App& app, GlobalOptions& g);

void write_text(const std::filesystem::path& path, const std::string& text);
/// Writes `text` and records its hash in the manifest.
void write_output(RunManifest& m, const std::filesystem::path& path, const std::string& text);
void record_input(RunManifest& m, const std::filesystem::path& path);
RunManifest start_manifest(const GlobalOptions& g, const std::string& settings);

}  // namespace vcx::cli
