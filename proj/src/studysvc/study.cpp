#include <algorithm>
#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "vcx/error.hpp"
#include "vcx/seed.hpp"
#include "vcx/study.hpp"

namespace vcx {

std::string_view to_string(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::Active: return "active";
    case SessionStatus::Complete: return "complete";
    case SessionStatus::Rejected: return "rejected";
  }
  return "active";
}

ReplayState replay_study_log(const std::filesystem::path& path, std::vector<std::string> ids,
                             const RankingConfig& cfg) {
  ReplayState st;
  st.ranker = std::make_unique<Ranker>(std::move(ids), cfg);
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open study log " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    // A torn final line from a crash is ignored; anything else is corruption.
    if (j.is_discarded()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(Errc::InvalidInput, "malformed record in " + path.string());
    }
    ++st.records;
    const std::string type = j.value("type", "trial");
    if (type == "trial") {
      TrialRecord t = trial_from_json(line);
      if (st.rejected_sessions.count(t.session_id)) t.excluded = true;
      st.last_trial_id = std::max(st.last_trial_id, t.trial_id);
      st.pending.push_back(std::move(t));
    } else if (type == "reject") {
      const std::string sid = j.at("session_id").get<std::string>();
      st.rejected_sessions.insert(sid);
      for (auto& t : st.pending)
        if (t.session_id == sid) t.excluded = true;
    } else if (type == "stage_close") {
      st.ranker->run_stage(std::move(st.pending));
      st.pending.clear();
    }
  }
  return st;
}

Study::Study(Catalog catalog, StudyConfig cfg) : catalog_(std::move(catalog)), cfg_(std::move(cfg)) {
  if (cfg_.attention_trials < 0) throw Error(Errc::InvalidInput, "attention trial count must be >= 0");
  std::size_t records = 0;
  if (cfg_.log_path && std::filesystem::exists(*cfg_.log_path)) {
    ReplayState st = replay_study_log(*cfg_.log_path, catalog_.ids(), cfg_.ranking);
    ranker_ = std::move(st.ranker);
    pending_ = std::move(st.pending);
    trial_counter_ = st.last_trial_id;
    records = st.records;
  } else {
    ranker_ = std::make_unique<Ranker>(catalog_.ids(), cfg_.ranking);
  }
  rng_.seed(splitmix64(cfg_.seed + records));
  if (cfg_.log_path) {
    if (cfg_.log_path->has_parent_path()) std::filesystem::create_directories(cfg_.log_path->parent_path());
    log_.open(*cfg_.log_path, std::ios::app);
    if (!log_) throw Error(Errc::Io, "cannot open study log " + cfg_.log_path->string());
  }
}

void Study::log_line(const std::string& line) {
  if (!log_.is_open()) return;
  log_ << line << '\n';
  log_.flush();
}

std::string Study::new_token() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string token;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t v = entropy_();
    for (int k = 0; k < 8; ++k, v >>= 4) token.push_back(kHex[v & 15]);
  }
  return token;
}

Session& Study::session_ref(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::UnknownSession, "unknown session " + id);
  return it->second;
}

Session Study::create_session(const std::string& rater_id, Viewport viewport) {
  std::lock_guard lock(mu_);
  if (viewport.width < kMinViewportWidth || viewport.height < kMinViewportHeight)
    throw Error(Errc::ViewportTooSmall, "viewport " + std::to_string(viewport.width) + "x" +
                                            std::to_string(viewport.height) + " is below " +
                                            std::to_string(kMinViewportWidth) + "x" +
                                            std::to_string(kMinViewportHeight));
  if (ranker_->converged()) throw Error(Errc::StageClosed, "the study has converged; no further stages");

  const auto k = static_cast<std::size_t>(cfg_.ranking.stage_pair_count);
  auto pairs = select_pairs(ranker_->states(), k, assigned_, rng_(), cfg_.ranking);
  if (pairs.size() < k) {
    // Every fresh pair of this stage is taken; reuse pairs, but not within the session.
    PairSet own(pairs.begin(), pairs.end());
    auto extra = select_pairs(ranker_->states(), k - pairs.size(), own, rng_(), cfg_.ranking);
    pairs.insert(pairs.end(), extra.begin(), extra.end());
  }
  assigned_.insert(pairs.begin(), pairs.end());

  const auto& ids = ranker_->ids();
  Session s;
  s.rater_id = rater_id;
  s.stage = ranker_->next_stage();
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%llu-", static_cast<unsigned long long>(++session_counter_));
  s.id = buf + new_token().substr(0, 12);

  std::uniform_int_distribution<int> coin(0, 1);
  for (const auto& [a, b] : pairs) {
    const bool swap = coin(rng_);
    s.queue.push_back({ids[swap ? b : a], ids[swap ? a : b], false});
  }
  const std::size_t total = s.queue.size() + static_cast<std::size_t>(cfg_.attention_trials);
  std::vector<std::size_t> slots(total);
  for (std::size_t i = 0; i < total; ++i) slots[i] = i;
  std::shuffle(slots.begin(), slots.end(), rng_);
  slots.resize(static_cast<std::size_t>(cfg_.attention_trials));
  std::sort(slots.begin(), slots.end());
  std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
  for (auto pos : slots) {
    const std::string stimulus = ids[pick(rng_)];
    const std::string control(kControlImageId);
    QueuedTrial q = coin(rng_) ? QueuedTrial{control, stimulus, true} : QueuedTrial{stimulus, control, true};
    s.queue.insert(s.queue.begin() + static_cast<std::ptrdiff_t>(pos), q);
  }
  s.attention_positions = slots;
  sessions_[s.id] = s;
  return s;
}

TrialOffer Study::next_trial(const std::string& session_id) {
  std::lock_guard lock(mu_);
  Session& s = session_ref(session_id);
  if (s.status == SessionStatus::Rejected) throw Error(Errc::SessionRejected, "session " + s.id + " was rejected");
  if (s.status == SessionStatus::Complete) throw Error(Errc::SessionComplete, "session " + s.id + " is complete");
  TrialOffer offer;
  offer.session_id = s.id;
  offer.total = s.queue.size();
  offer.index = s.progress;
  if (s.progress >= s.queue.size()) {
    s.status = SessionStatus::Complete;
    offer.done = true;
    return offer;
  }
  if (s.token.empty()) {
    s.token = new_token();
    tokens_[s.token] = {s.id, s.progress};
  }
  const auto& q = s.queue[s.progress];
  offer.left = q.left;
  offer.right = q.right;
  offer.token = s.token;
  return offer;
}

void Study::reject_locked(Session& s, const std::string& reason) {
  s.status = SessionStatus::Rejected;
  if (!s.token.empty()) {
    tokens_.erase(s.token);
    s.token.clear();
  }
  for (auto& t : pending_)
    if (t.session_id == s.id) t.excluded = true;
  nlohmann::ordered_json j;
  j["type"] = "reject";
  j["session_id"] = s.id;
  j["reason"] = reason;
  log_line(j.dump());
}

std::size_t Study::record_response(const std::string& token, const std::string& choice, double latency,
                                   const std::string& session_id) {
  std::lock_guard lock(mu_);
  if (used_tokens_.count(token)) throw Error(Errc::DuplicateResponse, "trial token already answered");
  auto it = tokens_.find(token);
  if (it == tokens_.end()) throw Error(Errc::InvalidToken, "unknown trial token");
  const auto [sid, index] = it->second;
  if (!session_id.empty() && session_id != sid) throw Error(Errc::InvalidToken, "token belongs to another session");
  Session& s = session_ref(sid);
  if (s.status == SessionStatus::Rejected) throw Error(Errc::SessionRejected, "session " + s.id + " was rejected");
  const QueuedTrial& q = s.queue[index];
  if (choice != q.left && choice != q.right) throw Error(Errc::InvalidChoice, "choice '" + choice + "' is not in the pair");
  if (!(latency > 0)) throw Error(Errc::InvalidInput, "latency must be positive");

  used_tokens_.insert(token);
  tokens_.erase(it);
  s.token.clear();
  ++s.progress;

  TrialRecord t;
  t.trial_id = ++trial_counter_;
  t.stage = s.stage;
  t.session_id = s.id;
  t.rater_id = s.rater_id;
  t.left = q.left;
  t.right = q.right;
  t.choice = choice;
  t.latency = latency;
  t.attention = q.attention;
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  const std::int64_t last = pending_.empty() ? 0 : pending_.back().timestamp_ms;
  t.timestamp_ms = std::max<std::int64_t>(now, last + 1);
  log_line(trial_to_json(t));
  pending_.push_back(t);

  if (q.attention && choice == kControlImageId) {
    ++s.attention_failures;
    reject_locked(s, "attention check failed");
  }
  return s.progress;
}

StageReport Study::close_stage(bool force) {
  std::lock_guard lock(mu_);
  const int stage = ranker_->next_stage();
  std::vector<Session*> unfinished;
  for (auto& [id, s] : sessions_) {
    if (s.stage != stage || s.status != SessionStatus::Active) continue;
    if (s.progress >= s.queue.size())
      s.status = SessionStatus::Complete;
    else
      unfinished.push_back(&s);
  }
  if (!unfinished.empty() && !force)
    throw Error(Errc::StageHasActiveSessions,
                std::to_string(unfinished.size()) + " sessions are still active in stage " + std::to_string(stage));
  for (Session* s : unfinished) reject_locked(*s, "voided at stage close");

  StageReport report = ranker_->run_stage(std::move(pending_));
  pending_.clear();
  assigned_.clear();
  nlohmann::ordered_json j;
  j["type"] = "stage_close";
  j["stage"] = stage;
  j["forced"] = force;
  j["valid_trials"] = report.valid_trials;
  log_line(j.dump());

  if (cfg_.snapshot_dir) {
    std::filesystem::create_directories(*cfg_.snapshot_dir);
    std::vector<ScoreRow> rows;
    for (std::size_t i = 0; i < ranker_->ids().size(); ++i) {
      const auto& st = ranker_->states()[i];
      rows.push_back({ranker_->ids()[i], st.mu, st.sigma, st.comparisons, 0.0});
    }
    if (ranker_->total_updates() > 0) rows = ranker_->final_scores();
    std::ofstream out(*cfg_.snapshot_dir / ("scores_stage_" + std::to_string(stage) + ".csv"));
    out << scores_csv(rows);
  }
  return report;
}

std::vector<ScoreRow> Study::scores() const {
  std::lock_guard lock(mu_);
  if (ranker_->total_updates() > 0) return ranker_->final_scores();
  std::vector<ScoreRow> rows;
  for (std::size_t i = 0; i < ranker_->ids().size(); ++i) {
    const auto& st = ranker_->states()[i];
    rows.push_back({ranker_->ids()[i], st.mu, st.sigma, st.comparisons, 0.0});
  }
  return rows;
}

StageInfo Study::stage_info() const {
  std::lock_guard lock(mu_);
  StageInfo info;
  info.stage = ranker_->next_stage();
  info.converged = ranker_->converged();
  for (const auto& [id, s] : sessions_)
    if (s.stage == info.stage && s.status == SessionStatus::Active && s.progress < s.queue.size())
      ++info.active_sessions;
  info.pending_trials = pending_.size();
  info.total_updates = ranker_->total_updates();
  info.history = ranker_->history();
  return info;
}

Session Study::session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::UnknownSession, "unknown session " + id);
  return it->second;
}

bool Study::converged() const {
  std::lock_guard lock(mu_);
  return ranker_->converged();
}

}  // namespace vcx
