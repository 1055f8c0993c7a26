#include <fstream>
#include <ostream>

#include <json.hpp>

#include "vcx/error.hpp"
#include "vcx/ranking.hpp"

namespace vcx {

std::string trial_to_json(const TrialRecord& t) {
  nlohmann::ordered_json j;
  j["type"] = "trial";
  j["trial_id"] = t.trial_id;
  j["stage"] = t.stage;
  j["session_id"] = t.session_id;
  j["rater_id"] = t.rater_id;
  j["left"] = t.left;
  j["right"] = t.right;
  j["choice"] = t.choice;
  j["latency"] = t.latency;
  j["attention"] = t.attention;
  j["excluded"] = t.excluded;
  j["timestamp_ms"] = t.timestamp_ms;
  return j.dump();
}

TrialRecord trial_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TrialRecord t;
    t.trial_id = j.at("trial_id").get<std::uint64_t>();
    t.stage = j.at("stage").get<int>();
    t.session_id = j.value("session_id", "");
    t.rater_id = j.value("rater_id", "");
    t.left = j.at("left").get<std::string>();
    t.right = j.at("right").get<std::string>();
    t.choice = j.at("choice").get<std::string>();
    t.latency = j.value("latency", 1.0);
    t.attention = j.value("attention", false);
    t.excluded = j.value("excluded", false);
    t.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, std::string("malformed trial record: ") + e.what());
  }
}

void append_trial(std::ostream& out, const TrialRecord& t) { out << trial_to_json(t) << '\n'; }

std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open trial log " + path.string());
  std::vector<TrialRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::InvalidInput, "malformed line in " + path.string());
    if (j.value("type", "trial") != "trial") continue;
    out.push_back(trial_from_json(line));
  }
  return out;
}

}  // namespace vcx
