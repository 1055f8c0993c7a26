#include <fstream>
#include <iostream>
#include <thread>

#include "commands.hpp"
#include "vcx/error.hpp"

namespace vcx::cli {

int GlobalOptions::job_count() const {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
}

void write_output(RunManifest& m, const std::filesystem::path& path, const std::string& text) {
  write_text(path, text);
  m.output_hashes[path.filename().string()] = content_hash(text);
}

void record_input(RunManifest& m, const std::filesystem::path& path) {
  m.input_hashes[path.string()] = file_hash(path);
}

RunManifest start_manifest(const GlobalOptions& g, const std::string& settings) {
  RunManifest m;
  m.command = g.command_line;
  m.config_hash = content_hash(settings);
  m.started_at = utc_timestamp();
  return m;
}

}  // namespace vcx::cli

int main(int argc, char** argv) {
  using namespace vcx::cli;
  CLI::App app{"Visualization complexity toolkit", "vcx"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  for (int i = 1; i < argc; ++i) g.command_line += (i > 1 ? " " : "") + std::string(argv[i]);
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--jobs", g.jobs, "Worker threads (default: hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_option("--config", g.config, "Study server config (JSON)");
  app.set_version_flag("--version", std::string(vcx::kToolVersion));

  register_metrics(app, g);
  register_rank(app, g);
  register_study(app, g);
  register_attribute(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "vcx: " << e.what() << "\n";
    return 2;
  } catch (const vcx::Error& e) {
    std::cerr << "vcx: " << vcx::errc_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vcx: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
