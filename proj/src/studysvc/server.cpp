#include <atomic>
#include <cstdlib>

// Project headers first: httplib pulls in <resolv.h>, whose _res macro breaks Eigen.
#include "vcx/codec.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/study.hpp"

#include <httplib.h>
#include <json.hpp>

namespace vcx {

using nlohmann::json;

ServerConfig load_server_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(csv::read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path q(p);
    return q.is_relative() ? base / q : q;
  };
  ServerConfig cfg;
  try {
    if (!j.contains("catalog")) throw Error(Errc::InvalidInput, path.string() + ": missing \"catalog\"");
    cfg.catalog = resolve(j.at("catalog").get<std::string>());
    if (j.contains("listen")) {
      cfg.host = j["listen"].value("host", cfg.host);
      cfg.port = j["listen"].value("port", cfg.port);
    }
    if (j.contains("log")) cfg.study.log_path = resolve(j["log"].get<std::string>());
    if (j.contains("snapshot_dir")) cfg.study.snapshot_dir = resolve(j["snapshot_dir"].get<std::string>());
    if (j.contains("static_dir")) cfg.static_dir = resolve(j["static_dir"].get<std::string>());
    cfg.study.seed = j.value("seed", cfg.study.seed);
    cfg.study.attention_trials = j.value("attention_trials", cfg.study.attention_trials);
    if (j.contains("ranking")) {
      const auto& r = j["ranking"];
      auto& k = cfg.study.ranking;
      k.mu0 = r.value("mu0", k.mu0);
      k.sigma0 = r.value("sigma0", k.sigma0);
      k.beta = r.value("beta", k.sigma0 / 2.0);
      k.tau = r.value("tau", k.sigma0 / 100.0);
      k.stage_pair_count = r.value("stage_pair_count", k.stage_pair_count);
      k.raters_per_stage = r.value("raters_per_stage", k.raters_per_stage);
      k.convergence_r = r.value("convergence_r", k.convergence_r);
      k.convergence_stages = r.value("convergence_stages", k.convergence_stages);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, path.string() + ": " + e.what());
  }
  if (const char* tok = std::getenv("VCX_OPERATOR_TOKEN")) cfg.operator_token = tok;
  return cfg;
}

namespace {

int http_status(Errc code) {
  switch (code) {
    case Errc::UnknownSession:
    case Errc::UnknownImage: return 404;
    case Errc::InvalidToken: return 403;
    case Errc::DuplicateResponse:
    case Errc::StageHasActiveSessions:
    case Errc::StageClosed: return 409;
    case Errc::SessionComplete: return 410;
    case Errc::SessionRejected: return 403;
    case Errc::ViewportTooSmall: return 422;
    case Errc::Io: return 500;
    default: return 400;
  }
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, {{"error", code}, {"message", message}}, status);
}

json report_json(const StageReport& r) {
  return {{"stage", r.stage},       {"pearson", r.pearson}, {"spearman", r.spearman},
          {"valid_trials", r.valid_trials}, {"counted", r.counted}, {"streak", r.streak},
          {"converged", r.converged}};
}

std::string image_url(const std::string& id) { return "/img/" + id; }

std::string content_type_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "image/png";
}

int int_param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) throw Error(Errc::InvalidInput, std::string("missing query parameter ") + key);
  try {
    return std::stoi(req.get_param_value(key));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidInput, std::string("query parameter ") + key + " is not an integer");
  }
}

}  // namespace

struct StudyServer::Impl {
  Study& study;
  std::string operator_token;
  httplib::Server http;
  std::string control_png;

  Impl(Study& s, std::string token) : study(s), operator_token(std::move(token)) {
    const auto bytes = encode_png(make_control_image());
    control_png.assign(bytes.begin(), bytes.end());
  }

  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), errc_name(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "InvalidInput", e.what());
    }
  }

  void install() {
    http.Get("/api/session", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string rater = req.has_param("rater_id") ? req.get_param_value("rater_id") : "anonymous";
        const Session s = study.create_session(rater, {int_param(req, "width"), int_param(req, "height")});
        send_json(res, {{"session_id", s.id}, {"stage", s.stage}, {"total_trials", s.queue.size()}});
      });
    });

    http.Get(R"(/api/session/([^/]+)/trial)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const TrialOffer o = study.next_trial(req.matches[1]);
        if (o.done) {
          send_json(res, {{"done", true}, {"session_id", o.session_id}, {"total", o.total}});
          return;
        }
        send_json(res, {{"done", false},
                        {"session_id", o.session_id},
                        {"token", o.token},
                        {"index", o.index},
                        {"total", o.total},
                        {"left", {{"id", o.left}, {"url", image_url(o.left)}}},
                        {"right", {{"id", o.right}, {"url", image_url(o.right)}}}});
      });
    });

    http.Post(R"(/api/session/([^/]+)/response)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = json::parse(req.body);
        const std::size_t progress =
            study.record_response(body.at("token").get<std::string>(), body.at("choice").get<std::string>(),
                                  body.value("latency", 0.0), req.matches[1]);
        send_json(res, {{"ok", true}, {"progress", progress}});
      });
    });

    http.Get("/api/scores", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        json rows = json::array();
        for (const auto& r : study.scores())
          rows.push_back({{"image_id", r.image_id},
                          {"mu", r.mu},
                          {"sigma", r.sigma},
                          {"n_comparisons", r.comparisons},
                          {"normalized_score", r.normalized}});
        send_json(res, {{"stage", study.stage_info().stage}, {"scores", rows}});
      });
    });

    http.Get("/api/stage", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        const StageInfo info = study.stage_info();
        json history = json::array();
        for (const auto& r : info.history) history.push_back(report_json(r));
        send_json(res, {{"stage", info.stage},
                        {"converged", info.converged},
                        {"active_sessions", info.active_sessions},
                        {"pending_trials", info.pending_trials},
                        {"total_updates", info.total_updates},
                        {"history", history}});
      });
    });

    http.Post("/api/stage/close", [this](const httplib::Request& req, httplib::Response& res) {
      if (operator_token.empty()) {
        send_error(res, 403, "Forbidden", "stage closing is disabled: VCX_OPERATOR_TOKEN is not set");
        return;
      }
      if (req.get_header_value("Authorization") != "Bearer " + operator_token) {
        send_error(res, 401, "Unauthorized", "missing or wrong operator token");
        return;
      }
      guarded(res, [&] {
        const bool force = req.has_param("force") && req.get_param_value("force") != "0" &&
                           req.get_param_value("force") != "false";
        send_json(res, report_json(study.close_stage(force)));
      });
    });

    http.Get(R"(/img/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (id == kControlImageId) {
        res.set_content(control_png, "image/png");
        return;
      }
      const CatalogEntry* e = study.catalog().find(id);
      if (!e) {
        send_error(res, 404, "UnknownImage", "no image " + id);
        return;
      }
      guarded(res, [&] {
        const auto bytes = csv::read_binary_file(e->path);
        res.set_content(std::string(bytes.begin(), bytes.end()), content_type_for(e->path));
      });
    });
  }
};

StudyServer::StudyServer(Study& study, std::string operator_token, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(study, std::move(operator_token))) {
  impl_->install();
  if (static_dir && !impl_->http.set_mount_point("/", static_dir->string()))
    throw Error(Errc::Io, "static directory not found: " + static_dir->string());
}

StudyServer::~StudyServer() = default;

bool StudyServer::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }
int StudyServer::bind_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }
bool StudyServer::listen_after_bind() { return impl_->http.listen_after_bind(); }
void StudyServer::stop() { impl_->http.stop(); }
void StudyServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace vcx
