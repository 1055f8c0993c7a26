#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <thread>

// Project headers first: httplib pulls in <resolv.h>, whose _res macro breaks Eigen.
#include "vcx/error.hpp"
#include "vcx/study.hpp"

#include <httplib.h>
#include <json.hpp>

using namespace vcx;
namespace fs = std::filesystem;

namespace {

Catalog synthetic_catalog(int n) {
  std::vector<CatalogEntry> entries;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "img%03d", i);
    entries.push_back({id, fs::path(id) += ".png", 800, 600, {}});
  }
  return Catalog(std::move(entries));
}

int rank_of(const std::string& id) { return std::stoi(id.substr(3)); }

/// Honest rater: the higher-numbered image is the more complex one, and the
/// control image always loses.
std::string honest(const TrialOffer& o) {
  if (o.left == kControlImageId) return o.right;
  if (o.right == kControlImageId) return o.left;
  return rank_of(o.left) > rank_of(o.right) ? o.left : o.right;
}

std::size_t answer_all(Study& st, const std::string& sid) {
  std::size_t answered = 0;
  while (true) {
    const TrialOffer o = st.next_trial(sid);
    if (o.done) return answered;
    st.record_response(o.token, honest(o), 1.5, sid);
    ++answered;
  }
}

constexpr Viewport kScreen{1280, 800};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vcx_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("catalog rejects duplicate ids and reports lookups") {
  const Catalog c = synthetic_catalog(3);
  CHECK(c.size() == 3);
  CHECK(c.find("img001") != nullptr);
  CHECK(c.find("nope") == nullptr);
  CHECK_THROWS_AS(Catalog({{"a", "a.png", 1, 1, {}}, {"a", "b.png", 1, 1, {}}}), Error);
}

TEST_CASE("sessions: viewport gate and trial count") {
  Study st(synthetic_catalog(100), {});
  try {
    st.create_session("r1", {1024, 700});
    FAIL("small viewport accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ViewportTooSmall);
  }
  CHECK_THROWS_AS(st.create_session("r1", {kMinViewportWidth - 1, kMinViewportHeight}), Error);
  const Session s = st.create_session("r1", {kMinViewportWidth, kMinViewportHeight});
  CHECK(s.queue.size() == 81);
  CHECK(std::count_if(s.queue.begin(), s.queue.end(), [](const QueuedTrial& q) { return q.attention; }) == 2);
  PairSet seen;
  for (const auto& q : s.queue) {
    if (q.attention) {
      CHECK((q.left == kControlImageId) != (q.right == kControlImageId));
      continue;
    }
    CHECK(q.left != q.right);
    const auto a = st.catalog().find(q.left) - &st.catalog().entries()[0];
    const auto b = st.catalog().find(q.right) - &st.catalog().entries()[0];
    CHECK(seen.insert(make_pair_key(a, b)).second);
  }
  CHECK(answer_all(st, s.id) == 81);
  CHECK(st.session(s.id).status == SessionStatus::Complete);
  CHECK_THROWS_AS(st.next_trial(s.id), Error);
}

TEST_CASE("sessions: tokens are idempotent and single-use") {
  Study st(synthetic_catalog(20), {});
  const Session s = st.create_session("r", kScreen);
  const TrialOffer a = st.next_trial(s.id);
  const TrialOffer b = st.next_trial(s.id);
  CHECK(a.token == b.token);
  CHECK(a.left == b.left);
  CHECK(a.index == 0);
  try {
    st.record_response(a.token, "img999", 1.0, s.id);
    FAIL("choice outside the pair accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidChoice);
  }
  CHECK(st.record_response(a.token, honest(a), 1.0, s.id) == 1);
  try {
    st.record_response(a.token, honest(a), 1.0, s.id);
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DuplicateResponse);
  }
  try {
    st.record_response("0123456789abcdef0123456789abcdef", "img000", 1.0);
    FAIL("forged token accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidToken);
  }
  CHECK(st.next_trial(s.id).index == 1);
  CHECK_THROWS_AS(st.next_trial("s999-none"), Error);
}

TEST_CASE("attention failure rejects the session and voids its trials") {
  StudyConfig cfg;
  cfg.ranking.stage_pair_count = 10;
  Study st(synthetic_catalog(30), cfg);
  const Session s = st.create_session("careless", kScreen);
  std::size_t inference = 0;
  while (true) {
    const TrialOffer o = st.next_trial(s.id);
    const bool attention = o.left == kControlImageId || o.right == kControlImageId;
    if (attention) {
      st.record_response(o.token, std::string(kControlImageId), 1.0, s.id);
      break;
    }
    st.record_response(o.token, honest(o), 1.0, s.id);
    ++inference;
  }
  CHECK(st.session(s.id).status == SessionStatus::Rejected);
  try {
    st.next_trial(s.id);
    FAIL("rejected session served");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SessionRejected);
  }
  CHECK(st.stage_info().active_sessions == 0);
  const StageReport r = st.close_stage();
  CHECK(r.valid_trials == 0);
  CHECK_FALSE(r.counted);
  CHECK(st.stage_info().total_updates == 0);
  MESSAGE(inference << " inference trials answered before the failure were voided");
}

TEST_CASE("stage close waits for active sessions unless forced") {
  StudyConfig cfg;
  cfg.ranking.stage_pair_count = 8;
  Study st(synthetic_catalog(30), cfg);
  const Session done = st.create_session("a", kScreen);
  answer_all(st, done.id);
  const Session open = st.create_session("b", kScreen);
  const TrialOffer o = st.next_trial(open.id);
  st.record_response(o.token, honest(o), 1.0, open.id);
  try {
    st.close_stage();
    FAIL("closed with an active session");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StageHasActiveSessions);
  }
  const StageReport r = st.close_stage(true);
  CHECK(r.valid_trials == 8);
  CHECK(st.session(open.id).status == SessionStatus::Rejected);
  CHECK(st.stage_info().stage == 1);
}

TEST_CASE("study stops accepting sessions after convergence") {
  StudyConfig cfg;
  cfg.ranking.stage_pair_count = 10;
  cfg.attention_trials = 0;
  Study st(synthetic_catalog(8), cfg);
  int stages = 0;
  while (!st.converged() && stages < 60) {
    const Session s = st.create_session("r", kScreen);
    answer_all(st, s.id);
    st.close_stage();
    ++stages;
  }
  REQUIRE(st.converged());
  try {
    st.create_session("late", kScreen);
    FAIL("session created after convergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StageClosed);
  }
  const auto scores = st.scores();
  CHECK(scores.front().mu < scores.back().mu);
}

TEST_CASE("log replay reproduces live state bit for bit") {
  const fs::path dir = scratch("replay");
  StudyConfig cfg;
  cfg.ranking.stage_pair_count = 12;
  cfg.log_path = dir / "study.jsonl";
  cfg.snapshot_dir = dir / "snapshots";
  cfg.seed = 5;
  const Catalog catalog = synthetic_catalog(25);
  fs::path copy = dir / "crashed.jsonl";
  std::vector<ScoreRow> live;
  {
    Study st(catalog, cfg);
    for (int stage = 0; stage < 3; ++stage) {
      for (int r = 0; r < 3; ++r) answer_all(st, st.create_session("r" + std::to_string(r), kScreen).id);
      st.close_stage();
    }
    // A finished, unclosed stage at the time of the crash.
    answer_all(st, st.create_session("tail", kScreen).id);
    fs::copy_file(*cfg.log_path, copy);
    st.close_stage();
    live = st.scores();
    CHECK(fs::exists(dir / "snapshots" / "scores_stage_3.csv"));
  }

  const ReplayState rs = replay_study_log(*cfg.log_path, catalog.ids(), cfg.ranking);
  CHECK(rs.pending.empty());
  REQUIRE(rs.ranker->history().size() == 4);
  for (std::size_t i = 0; i < live.size(); ++i) {
    const auto& s = rs.ranker->states()[i];
    CHECK(s.mu == live[i].mu);
    CHECK(s.sigma == live[i].sigma);
    CHECK(s.comparisons == live[i].comparisons);
  }
  // Attention trials never reach the comparison matrix.
  CHECK(rs.ranker->matrix().sum() == 3 * 3 * 12 + 12);

  StudyConfig recovered = cfg;
  recovered.log_path = copy;
  recovered.snapshot_dir.reset();
  Study st(catalog, recovered);
  const StageInfo info = st.stage_info();
  CHECK(info.stage == 3);
  CHECK(info.pending_trials == 14);
  st.close_stage();
  const auto again = st.scores();
  for (std::size_t i = 0; i < live.size(); ++i) {
    CHECK(again[i].mu == live[i].mu);
    CHECK(again[i].sigma == live[i].sigma);
  }
  fs::remove_all(dir);
}

TEST_CASE("replay: torn final line is ignored, corruption is not") {
  const fs::path dir = scratch("torn");
  const Catalog catalog = synthetic_catalog(5);
  {
    std::ofstream out(dir / "ok.jsonl");
    out << R"({"type":"trial","trial_id":1,"stage":0,"session_id":"s1","rater_id":"r","left":"img000","right":"img001","choice":"img001","latency":1.0,"attention":false,"timestamp_ms":5})"
        << "\n{\"type\":\"stage_close\",\"stage\":0}\n{\"type\":\"tri";
  }
  const auto rs = replay_study_log(dir / "ok.jsonl", catalog.ids(), {});
  CHECK(rs.ranker->total_updates() == 1);
  CHECK(rs.ranker->matrix()(1, 0) == 1);
  {
    std::ofstream out(dir / "bad.jsonl");
    out << "{\"type\":\"tri\n{\"type\":\"stage_close\",\"stage\":0}\n";
  }
  CHECK_THROWS_AS(replay_study_log(dir / "bad.jsonl", catalog.ids(), {}), Error);
  fs::remove_all(dir);
}

TEST_CASE("server config parsing") {
  const fs::path dir = scratch("config");
  {
    std::ofstream out(dir / "study.json");
    out << R"({"catalog": "catalog.csv", "listen": {"port": 9090}, "log": "logs/study.jsonl", "seed": 3,
              "ranking": {"stage_pair_count": 40}})";
  }
  const ServerConfig c = load_server_config(dir / "study.json");
  CHECK(c.catalog == dir / "catalog.csv");
  CHECK(c.port == 9090);
  CHECK(c.host == "127.0.0.1");
  CHECK(*c.study.log_path == dir / "logs/study.jsonl");
  CHECK(c.study.seed == 3);
  CHECK(c.study.ranking.stage_pair_count == 40);
  {
    std::ofstream out(dir / "broken.json");
    out << R"({"listen": {"port": 1}})";
  }
  CHECK_THROWS_AS(load_server_config(dir / "broken.json"), Error);
  fs::remove_all(dir);
}

TEST_CASE("http api") {
  StudyConfig cfg;
  cfg.ranking.stage_pair_count = 6;
  Study study(synthetic_catalog(12), cfg);
  StudyServer server(study, "secret");
  const int port = server.bind_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);
  using nlohmann::json;

  auto small = cli.Get("/api/session?rater_id=x&width=1024&height=700");
  REQUIRE(small);
  CHECK(small->status == 422);
  CHECK(json::parse(small->body)["error"] == "ViewportTooSmall");

  auto created = cli.Get("/api/session?rater_id=x&width=1280&height=800");
  REQUIRE(created);
  REQUIRE(created->status == 200);
  const json s = json::parse(created->body);
  const std::string sid = s["session_id"];
  CHECK(s["total_trials"] == 8);

  auto busy = cli.Post("/api/stage/close", "", "application/json");
  REQUIRE(busy);
  CHECK(busy->status == 401);
  httplib::Headers auth{{"Authorization", "Bearer secret"}};
  auto early = cli.Post("/api/stage/close", auth, "", "application/json");
  REQUIRE(early);
  CHECK(early->status == 409);

  int answered = 0;
  while (true) {
    auto t = cli.Get("/api/session/" + sid + "/trial");
    REQUIRE(t);
    REQUIRE(t->status == 200);
    const json offer = json::parse(t->body);
    if (offer["done"]) break;
    TrialOffer o;
    o.left = offer["left"]["id"];
    o.right = offer["right"]["id"];
    CHECK(offer["left"]["url"] == "/img/" + o.left);
    const json body{{"token", offer["token"]}, {"choice", honest(o)}, {"latency", 2.0}};
    auto r = cli.Post("/api/session/" + sid + "/response", body.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body)["progress"] == ++answered);
    auto dup = cli.Post("/api/session/" + sid + "/response", body.dump(), "application/json");
    REQUIRE(dup);
    CHECK(dup->status == 409);
  }
  CHECK(answered == 8);

  auto control = cli.Get("/img/" + std::string(kControlImageId));
  REQUIRE(control);
  CHECK(control->status == 200);
  CHECK(control->get_header_value("Content-Type") == "image/png");
  CHECK(control->body.substr(1, 3) == "PNG");
  auto missing = cli.Get("/img/nothing");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  auto closed = cli.Post("/api/stage/close", auth, "", "application/json");
  REQUIRE(closed);
  REQUIRE(closed->status == 200);
  CHECK(json::parse(closed->body)["valid_trials"] == 6);

  auto stage = cli.Get("/api/stage");
  REQUIRE(stage);
  const json info = json::parse(stage->body);
  CHECK(info["stage"] == 1);
  CHECK(info["total_updates"] == 6);
  CHECK(info["history"].size() == 1);

  auto scores = cli.Get("/api/scores");
  REQUIRE(scores);
  const json sc = json::parse(scores->body);
  CHECK(sc["scores"].size() == 12);

  server.stop();
  worker.join();
}

TEST_CASE("http api: closing is disabled without an operator token") {
  Study study(synthetic_catalog(4), {});
  StudyServer server(study, "");
  const int port = server.bind_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);
  auto r = cli.Post("/api/stage/close", httplib::Headers{{"Authorization", "Bearer "}}, "", "application/json");
  REQUIRE(r);
  CHECK(r->status == 403);
  server.stop();
  worker.join();
}
