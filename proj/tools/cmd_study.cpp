#include <csignal>
#include <cstdlib>
#include <iostream>

// Project headers first: httplib pulls in <resolv.h>, whose _res macro breaks Eigen.
#include "commands.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/study.hpp"

#include <httplib.h>

namespace vcx::cli {
namespace {

StudyServer* g_server = nullptr;

extern "C" void handle_signal(int) {
  if (g_server) g_server->stop();
}

struct ServeArgs {
  std::optional<std::string> host;
  std::optional<int> port;
};

struct CloseArgs {
  std::string url = "http://127.0.0.1:8080";
  bool force = false;
  std::optional<std::string> token;
};

struct ExportArgs {
  std::optional<std::filesystem::path> log;
  std::optional<std::filesystem::path> catalog;
  std::filesystem::path out_dir;
};

ServerConfig require_config(const GlobalOptions& g, const char* command) {
  if (!g.config) throw ConfigError(std::string(command) + " needs --config <server.json>");
  if (!std::filesystem::exists(*g.config)) throw ConfigError("--config: no such file " + g.config->string());
  try {
    return load_server_config(*g.config);
  } catch (const Error& e) {
    throw ConfigError(std::string("--config: ") + e.what());
  }
}

void run_serve(const ServeArgs& a, const GlobalOptions& g) {
  ServerConfig cfg = require_config(g, "serve");
  if (a.host) cfg.host = *a.host;
  if (a.port) cfg.port = *a.port;
  if (g.seed) cfg.study.seed = *g.seed;
  if (cfg.operator_token.empty())
    std::cerr << "vcx: warning: VCX_OPERATOR_TOKEN is unset; stage closing over HTTP is disabled\n";
  Study study(Catalog::load_csv(cfg.catalog), cfg.study);
  StudyServer server(study, cfg.operator_token, cfg.static_dir);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cerr << "vcx: serving " << study.catalog().size() << " images on http://" << cfg.host << ":" << cfg.port
            << "\n";
  const bool ok = server.listen(cfg.host, cfg.port);
  g_server = nullptr;
  if (!ok) throw Error(Errc::Io, "cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
}

void run_close(const CloseArgs& a) {
  std::string token;
  if (a.token)
    token = *a.token;
  else if (const char* env = std::getenv("VCX_OPERATOR_TOKEN"))
    token = env;
  if (token.empty()) throw ConfigError("stage close needs --token or VCX_OPERATOR_TOKEN");
  httplib::Client client(a.url);
  client.set_connection_timeout(5);
  const httplib::Headers headers{{"Authorization", "Bearer " + token}};
  const auto res = client.Post(std::string("/api/stage/close?force=") + (a.force ? "1" : "0"), headers, "",
                               "application/json");
  if (!res) throw Error(Errc::Io, "cannot reach " + a.url + ": " + httplib::to_string(res.error()));
  std::cout << res->body << "\n";
  if (res->status == 401 || res->status == 403) throw ConfigError("server refused the operator token");
  if (res->status != 200) throw Error(Errc::InvalidInput, "stage close failed with HTTP " + std::to_string(res->status));
}

void run_export(const ExportArgs& a, const GlobalOptions& g) {
  RankingConfig ranking;
  std::optional<std::filesystem::path> log = a.log, catalog_path = a.catalog;
  if (g.config) {
    const ServerConfig cfg = require_config(g, "export");
    ranking = cfg.study.ranking;
    if (!log) log = cfg.study.log_path;
    if (!catalog_path) catalog_path = cfg.catalog;
  }
  if (!log) throw ConfigError("export needs --log (or a --config naming one)");
  if (!catalog_path) throw ConfigError("export needs --catalog (or a --config naming one)");
  if (!std::filesystem::exists(*log)) throw ConfigError("--log: no such file " + log->string());
  const Catalog catalog = Catalog::load_csv(*catalog_path, false);
  const ReplayState st = replay_study_log(*log, catalog.ids(), ranking);
  const auto rows = st.ranker->final_scores();

  const auto& ids = st.ranker->ids();
  const auto& M = st.ranker->matrix();
  std::vector<std::string> header{"image_id"};
  header.insert(header.end(), ids.begin(), ids.end());
  std::string matrix = csv::join(header) + "\n";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<std::string> cells{ids[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < M.cols(); ++j) cells.push_back(std::to_string(M(i, j)));
    matrix += csv::join(cells) + "\n";
  }
  std::string stages = "stage,valid_trials,counted,pearson,spearman,streak,converged\n";
  for (const auto& r : st.ranker->history())
    stages += csv::join({std::to_string(r.stage), std::to_string(r.valid_trials), r.counted ? "1" : "0",
                         csv::format_double(r.pearson), csv::format_double(r.spearman), std::to_string(r.streak),
                         r.converged ? "1" : "0"}) +
              "\n";

  RunManifest m = start_manifest(g, "export;mu0=" + csv::format_double(ranking.mu0) +
                                        ";sigma0=" + csv::format_double(ranking.sigma0) +
                                        ";beta=" + csv::format_double(ranking.beta) +
                                        ";tau=" + csv::format_double(ranking.tau));
  record_input(m, *log);
  record_input(m, *catalog_path);
  write_output(m, a.out_dir / "scores.csv", scores_csv(rows));
  write_output(m, a.out_dir / "comparison_matrix.csv", matrix);
  write_output(m, a.out_dir / "stages.csv", stages);
  m.finished_at = utc_timestamp();
  m.write(a.out_dir / "manifest.json");
  std::cout << "exported " << rows.size() << " scores from " << st.ranker->total_updates() << " comparisons\n";
}

}  // namespace

void register_study(CLI::App& app, GlobalOptions& g) {
  auto sa = std::make_shared<ServeArgs>();
  auto* serve = app.add_subcommand("serve", "Run the pairwise-comparison study server");
  serve->add_option("--host", sa->host, "Override the configured listen host");
  serve->add_option("--port", sa->port, "Override the configured listen port");
  serve->callback([sa, &g] { run_serve(*sa, g); });

  auto* stage = app.add_subcommand("stage", "Study stage administration");
  stage->require_subcommand(1);
  auto ca = std::make_shared<CloseArgs>();
  auto* close = stage->add_subcommand("close", "Close the current stage on a running server");
  close->add_option("--url", ca->url, "Server base URL")->capture_default_str();
  close->add_flag("--force", ca->force, "Void unfinished sessions instead of refusing");
  close->add_option("--token", ca->token, "Operator token (default: VCX_OPERATOR_TOKEN)");
  close->callback([ca] { run_close(*ca); });

  auto ea = std::make_shared<ExportArgs>();
  auto* exp = app.add_subcommand("export", "Replay a study log into scores and a comparison matrix");
  exp->add_option("--log", ea->log, "Study log (JSON lines)");
  exp->add_option("--catalog", ea->catalog, "Catalog CSV")->check(CLI::ExistingFile);
  exp->add_option("--out-dir", ea->out_dir, "Output directory")->required();
  exp->callback([ea, &g] { run_export(*ea, g); });
}

}  // namespace vcx::cli
