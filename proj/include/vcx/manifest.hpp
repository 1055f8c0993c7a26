#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace vcx {

inline constexpr std::string_view kToolVersion = "0.4.0";

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string content_hash(std::span<const unsigned char> bytes);
std::string content_hash(std::string_view text);
std::string file_hash(const std::filesystem::path& path);

/// Provenance record written next to every primary output. Re-running a
/// command with the same config hash, input hashes and seed reproduces
/// byte-identical primary outputs; only the timestamps differ.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;
  std::map<std::string, std::string> output_hashes;
  std::optional<std::uint64_t> seed;
  std::string tool_version{kToolVersion};
  std::string started_at;
  std::string finished_at;

  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

std::string utc_timestamp();

}  // namespace vcx
