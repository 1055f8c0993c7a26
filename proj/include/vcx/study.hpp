#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vcx/image.hpp"
#include "vcx/ranking.hpp"

namespace vcx {

struct CatalogEntry {
  std::string id;
  std::filesystem::path path;
  int width = 0;
  int height = 0;
  std::set<std::string> tags;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<CatalogEntry> entries);

  /// CSV with columns id,path,tags (tags separated by ';'). Relative paths
  /// resolve against the CSV's directory. With `probe`, every image is
  /// decoded to verify it and record its size.
  static Catalog load_csv(const std::filesystem::path& path, bool probe = true);

  const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }
  std::vector<std::string> ids() const;
  const CatalogEntry* find(const std::string& id) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<CatalogEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

/// Id of the synthetic near-blank image used in attention trials.
inline constexpr std::string_view kControlImageId = "__control__";
/// White canvas with one faint grey stroke.
ImageRaster make_control_image(int width = 640, int height = 480);

inline constexpr int kMinViewportWidth = 1028;
inline constexpr int kMinViewportHeight = 764;

struct Viewport {
  int width = 0;
  int height = 0;
};

enum class SessionStatus { Active, Complete, Rejected };
std::string_view to_string(SessionStatus s) noexcept;

struct QueuedTrial {
  std::string left;
  std::string right;
  bool attention = false;
};

struct Session {
  std::string id;
  std::string rater_id;
  int stage = 0;
  std::vector<QueuedTrial> queue;
  std::size_t progress = 0;
  std::vector<std::size_t> attention_positions;
  SessionStatus status = SessionStatus::Active;
  int attention_failures = 0;
  /// Outstanding token for queue[progress], empty until next_trial is called.
  std::string token;
};

struct TrialOffer {
  bool done = false;
  std::string session_id;
  std::size_t index = 0;
  std::size_t total = 0;
  std::string left;
  std::string right;
  std::string token;
};

struct StageInfo {
  int stage = 0;
  bool converged = false;
  std::size_t active_sessions = 0;
  std::size_t pending_trials = 0;
  std::uint64_t total_updates = 0;
  std::vector<StageReport> history;
};

struct StudyConfig {
  RankingConfig ranking;
  std::uint64_t seed = 1;
  int attention_trials = 2;
  /// Append-only JSON-lines log; replayed on construction when it exists.
  std::optional<std::filesystem::path> log_path;
  /// Score CSV written at every stage close.
  std::optional<std::filesystem::path> snapshot_dir;
};

/// Result of replaying a study log without live sessions.
struct ReplayState {
  std::unique_ptr<Ranker> ranker;
  /// Trials recorded after the last stage close, with exclusions applied.
  std::vector<TrialRecord> pending;
  std::set<std::string> rejected_sessions;
  std::uint64_t last_trial_id = 0;
  std::size_t records = 0;
};

/// Applies trial, reject and stage_close records in file order.
ReplayState replay_study_log(const std::filesystem::path& path, std::vector<std::string> ids,
                             const RankingConfig& cfg);

/// Session management and response recording around one Ranker. All public
/// members are thread-safe; mutations serialize on one lock.
class Study {
 public:
  Study(Catalog catalog, StudyConfig cfg);

  Session create_session(const std::string& rater_id, Viewport viewport);
  TrialOffer next_trial(const std::string& session_id);
  /// Returns the session's progress after the response is applied.
  std::size_t record_response(const std::string& token, const std::string& choice, double latency,
                              const std::string& session_id = {});
  StageReport close_stage(bool force = false);

  /// Current posterior state per image (normalized in [0,1]; all 0 before any update).
  std::vector<ScoreRow> scores() const;
  StageInfo stage_info() const;
  Session session(const std::string& id) const;
  const Catalog& catalog() const noexcept { return catalog_; }
  bool converged() const;

 private:
  void log_line(const std::string& line);
  std::string new_token();
  Session& session_ref(const std::string& id);
  void reject_locked(Session& s, const std::string& reason);

  Catalog catalog_;
  StudyConfig cfg_;
  mutable std::mutex mu_;
  std::unique_ptr<Ranker> ranker_;
  std::vector<TrialRecord> pending_;
  std::map<std::string, Session> sessions_;
  std::map<std::string, std::pair<std::string, std::size_t>> tokens_;
  std::set<std::string> used_tokens_;
  PairSet assigned_;
  std::uint64_t session_counter_ = 0;
  std::uint64_t trial_counter_ = 0;
  std::mt19937_64 rng_;
  std::random_device entropy_;
  std::ofstream log_;
};

// --- HTTP ------------------------------------------------------------------------

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path catalog;
  std::optional<std::filesystem::path> static_dir;
  StudyConfig study;
  std::string operator_token;
};

/// JSON config: {"catalog", "listen": {"host", "port"}, "log", "snapshot_dir",
/// "static_dir", "seed", "attention_trials", "ranking": {...}}. Relative
/// paths resolve against the config file's directory. The operator token
/// comes from VCX_OPERATOR_TOKEN.
ServerConfig load_server_config(const std::filesystem::path& path);

class StudyServer {
 public:
  StudyServer(Study& study, std::string operator_token, std::optional<std::filesystem::path> static_dir = {});
  ~StudyServer();

  /// Binds and serves until stop(); returns false if binding fails.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vcx
