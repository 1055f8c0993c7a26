#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "commands.hpp"
#include "vcx/codec.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/metrics.hpp"
#include "vcx/objects.hpp"
#include "vcx/study.hpp"

namespace vcx::cli {
namespace {

struct ComputeArgs {
  std::filesystem::path catalog;
  std::filesystem::path out;
  std::optional<std::filesystem::path> dict;
  std::optional<std::filesystem::path> boxes;
  std::vector<std::string> only;
  std::string tir_mode = "ink";
  bool invert_h = false;
  bool skip_errors = false;
};

struct MecArgs {
  std::filesystem::path image;
  std::optional<std::filesystem::path> dict;
  double delta_e = 14.0;
  double min_share = 0.005;
};

std::string join_tags(const std::set<std::string>& tags) {
  std::string out;
  for (const auto& t : tags) out += (out.empty() ? "" : ";") + t;
  return out;
}

void run_compute(const ComputeArgs& a, const GlobalOptions& g) {
  MetricOptions opts;
  try {
    opts.tir_mode = parse_tir_mode(a.tir_mode);
  } catch (const Error& e) {
    throw ConfigError(std::string("--tir-mode: ") + e.what());
  }
  opts.invert_h = a.invert_h;
  if (!a.only.empty()) {
    std::set<Metric> wanted;
    for (const auto& name : a.only) {
      const auto m = parse_metric(name);
      if (!m) throw ConfigError("--only: unknown metric " + name);
      wanted.insert(*m);
    }
    opts.only = std::move(wanted);
  }
  if (opts.wants(Metric::MeC) && !a.dict)
    throw ConfigError("--dict is required when O.MeC is computed (or restrict metrics with --only)");

  const Catalog catalog = Catalog::load_csv(a.catalog, false);
  std::optional<ColorDictionary> dict;
  if (a.dict) dict = ColorDictionary::load_csv(*a.dict);
  std::map<std::string, TextBoxSet> boxes;
  if (a.boxes) boxes = load_text_boxes(*a.boxes);

  const auto& entries = catalog.entries();
  std::vector<std::optional<MetricVector>> rows(entries.size());
  std::vector<std::string> failures(entries.size());
  const TextBoxSet no_boxes;

  auto work = [&](std::size_t i) {
    const auto& e = entries[i];
    try {
      const ImageRaster img = load_image(e.path, e.id);
      const TextBoxSet* b = nullptr;
      if (a.boxes) {
        auto it = boxes.find(e.id);
        b = it == boxes.end() ? &no_boxes : &it->second;
      }
      MetricVector v = compute_all(img, b, dict ? &*dict : nullptr, opts);
      if (v.tir_missing) v[Metric::TiR] = std::numeric_limits<double>::quiet_NaN();
      rows[i] = std::move(v);
    } catch (const Error& err) {
      failures[i] = e.id + ": " + std::string(errc_name(err.code())) + ": " + err.what();
    }
  };
  const auto jobs = static_cast<std::size_t>(std::min<int>(g.job_count(), static_cast<int>(std::max<std::size_t>(1, entries.size()))));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < entries.size(); i += jobs) work(i);
    });
  for (auto& th : pool) th.join();

  std::vector<MetricVector> ok;
  std::vector<const CatalogEntry*> ok_entries;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!failures[i].empty()) {
      std::cerr << "vcx: " << failures[i] << "\n";
      ++failed;
      continue;
    }
    ok.push_back(std::move(*rows[i]));
    ok_entries.push_back(&entries[i]);
  }
  if (failed && !a.skip_errors)
    throw Error(Errc::InvalidInput, std::to_string(failed) + " image(s) failed; rerun with --skip-errors to drop them");
  if (a.boxes == std::nullopt && opts.wants(Metric::TiR))
    std::cerr << "vcx: warning: no --boxes given, O.TiR left empty\n";

  const auto norm = normalize_catalog(ok);
  std::vector<std::string> header{"image_id", "width", "height", "tags"};
  for (auto c : kMetricColumns) header.emplace_back(c);
  for (auto c : kMetricColumns) header.push_back("norm." + std::string(c));
  std::string text = csv::join(header) + "\n";
  for (std::size_t i = 0; i < ok.size(); ++i) {
    std::vector<std::string> cells{ok[i].image_id, std::to_string(ok[i].width), std::to_string(ok[i].height),
                                   join_tags(ok_entries[i]->tags)};
    for (double v : ok[i].values) cells.push_back(csv::format_double(v));
    for (double v : norm[i]) cells.push_back(csv::format_double(v));
    text += csv::join(cells) + "\n";
  }

  std::ostringstream settings;
  settings << "metrics compute;only=" << csv::join(a.only) << ";tir=" << to_string(opts.tir_mode)
           << ";invert_h=" << a.invert_h << ";kc=" << kc_compressor_name() << ":" << opts.kc_level
           << ";skip_errors=" << a.skip_errors;
  RunManifest m = start_manifest(g, settings.str());
  record_input(m, a.catalog);
  if (a.dict) record_input(m, *a.dict);
  if (a.boxes) record_input(m, *a.boxes);
  for (const auto* e : ok_entries) m.input_hashes[e->path.string()] = file_hash(e->path);
  m.input_hashes["kc_compressor"] = std::string(kc_compressor_name()) + "-" + std::to_string(opts.kc_level);
  m.input_hashes["tir_mode"] = std::string(to_string(opts.tir_mode));
  write_output(m, a.out, text);
  m.finished_at = utc_timestamp();
  m.write(a.out.string() + ".manifest.json");
  std::cout << "wrote " << ok.size() << " rows to " << a.out.string() << "\n";
}

void run_mec(const MecArgs& a) {
  if (!a.dict) throw ConfigError("--dict is required for metrics mec");
  if (!(a.delta_e > 0)) throw ConfigError("--delta-e must be positive");
  if (!(a.min_share >= 0 && a.min_share < 1)) throw ConfigError("--min-share must lie in [0, 1)");
  const ColorDictionary dict = ColorDictionary::load_csv(*a.dict);
  const ImageRaster img = load_image(a.image, a.image.stem().string());
  MecOptions opts;
  opts.delta_e_max = a.delta_e;
  opts.min_share = a.min_share;
  const MecReport r = metric_mec(img, dict, opts);
  nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
  for (const auto& c : r.clusters) {
    char hex[8];
    std::snprintf(hex, sizeof hex, "#%02x%02x%02x", c.color.r, c.color.g, c.color.b);
    clusters.push_back({{"representative", c.representative}, {"color", hex}, {"share", c.share}, {"members", c.members}});
  }
  nlohmann::ordered_json out = {{"image", a.image.string()},
                                {"named_count", r.named_count},
                                {"namable_count", r.namable_count},
                                {"merged_count", r.merged_count},
                                {"clusters", clusters}};
  std::cout << out.dump(2) << "\n";
}

}  // namespace

void register_metrics(CLI::App& app, GlobalOptions& g) {
  auto* metrics = app.add_subcommand("metrics", "Per-image complexity metrics");
  metrics->require_subcommand(1);

  auto ca = std::make_shared<ComputeArgs>();
  auto* compute = metrics->add_subcommand("compute", "Compute metrics for every image in a catalog");
  compute->add_option("--catalog", ca->catalog, "Catalog CSV (id,path[,tags])")->required()->check(CLI::ExistingFile);
  compute->add_option("--out", ca->out, "Output CSV")->required();
  compute->add_option("--dict", ca->dict, "Colour dictionary CSV (name,r,g,b,group)")->check(CLI::ExistingFile);
  compute->add_option("--boxes", ca->boxes, "Text box annotations (JSON lines)")->check(CLI::ExistingFile);
  compute->add_option("--only", ca->only, "Restrict to these metrics, e.g. O.ED,O.IE")->delimiter(',');
  compute->add_option("--tir-mode", ca->tir_mode, "ink or box-area")->capture_default_str();
  compute->add_flag("--invert-h", ca->invert_h, "Report 1 - homogeneity for O.H");
  compute->add_flag("--skip-errors", ca->skip_errors, "Drop images that fail instead of exiting");
  compute->callback([ca, &g] { run_compute(*ca, g); });

  auto ma = std::make_shared<MecArgs>();
  auto* mec = metrics->add_subcommand("mec", "Meaningful-colour breakdown for one image");
  mec->add_option("--image", ma->image, "PNG or JPEG")->required()->check(CLI::ExistingFile);
  mec->add_option("--dict", ma->dict, "Colour dictionary CSV")->check(CLI::ExistingFile);
  mec->add_option("--delta-e", ma->delta_e, "Merge threshold (CIE76)")->capture_default_str();
  mec->add_option("--min-share", ma->min_share, "Pixel-share noise floor")->capture_default_str();
  mec->callback([ma] { run_mec(*ma); });
}

}  // namespace vcx::cli
