#include "vcx/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "vcx/csv.hpp"
#include "vcx/error.hpp"

namespace vcx {

std::string content_hash(std::span<const unsigned char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string content_hash(std::string_view text) {
  return content_hash(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string file_hash(const std::filesystem::path& path) {
  auto bytes = csv::read_binary_file(path);
  return content_hash(std::span<const unsigned char>(bytes));
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["input_hashes"] = input_hashes;
  j["output_hashes"] = output_hashes;
  if (seed) j["seed"] = *seed;
  else j["seed"] = nullptr;
  j["tool_version"] = tool_version;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  return j.dump(2);
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << to_json() << '\n';
}

}  // namespace vcx
