#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/ranking.hpp"

namespace vcx::cli {
namespace {

struct SimulateArgs {
  std::size_t items = 100;
  std::size_t trials = 742;
  std::string policy = "active";
  std::size_t stage_size = 79;
  double latent_range = 10.0;
  int repeat = 0;
  std::optional<std::filesystem::path> out_dir;
};

void run_simulate(const SimulateArgs& a, const GlobalOptions& g) {
  if (a.items < 2) throw ConfigError("--items must be at least 2");
  if (a.trials < 1) throw ConfigError("--trials must be at least 1");
  if (a.stage_size < 1) throw ConfigError("--stage-size must be at least 1");
  if (!(a.latent_range > 0)) throw ConfigError("--latent-range must be positive");
  if (a.repeat < 0) throw ConfigError("--repeat must be non-negative");
  SimulationConfig cfg;
  try {
    cfg.policy = parse_policy(a.policy);
  } catch (const Error& e) {
    throw ConfigError(std::string("--policy: ") + e.what());
  }
  cfg.items = a.items;
  cfg.trials = a.trials;
  cfg.stage_size = a.stage_size;
  cfg.latent_range = a.latent_range;
  cfg.seed = g.seed_or(1);

  const SimulationResult res = simulate_study(cfg);
  std::string curve = "stage,trials,spearman_truth,pearson_prev\n";
  for (const auto& p : res.curve)
    curve += csv::join({std::to_string(p.stage), std::to_string(p.trials), csv::format_double(p.spearman_truth),
                        csv::format_double(p.pearson_prev)}) +
             "\n";

  std::string efficiency;
  if (a.repeat > 0) {
    SimulationConfig active = cfg, random = cfg;
    active.policy = SamplingPolicy::Active;
    random.policy = SamplingPolicy::Random;
    const PolicyCurve ca = average_curve(active, a.repeat), cr = average_curve(random, a.repeat);
    efficiency = "trials,active,random\n";
    for (std::size_t i = 0; i < std::min(ca.trials.size(), cr.trials.size()); ++i)
      efficiency += csv::join({std::to_string(ca.trials[i]), csv::format_double(ca.mean_spearman[i]),
                               csv::format_double(cr.mean_spearman[i])}) +
                    "\n";
  }

  if (a.out_dir) {
    std::ostringstream settings;
    settings << "rank simulate;items=" << a.items << ";trials=" << a.trials << ";policy=" << to_string(cfg.policy)
             << ";stage_size=" << a.stage_size << ";latent_range=" << a.latent_range << ";repeat=" << a.repeat;
    RunManifest m = start_manifest(g, settings.str());
    m.seed = cfg.seed;
    write_output(m, *a.out_dir / "scores.csv", scores_csv(res.scores));
    write_output(m, *a.out_dir / "curve.csv", curve);
    std::ostringstream trials;
    for (const auto& t : res.trials) append_trial(trials, t);
    write_output(m, *a.out_dir / "trials.jsonl", trials.str());
    std::string latent = "image_id,latent\n";
    for (std::size_t i = 0; i < res.latent.size(); ++i)
      latent += csv::join({res.scores[i].image_id, csv::format_double(res.latent[i])}) + "\n";
    write_output(m, *a.out_dir / "latent.csv", latent);
    if (!efficiency.empty()) write_output(m, *a.out_dir / "efficiency.csv", efficiency);
    m.finished_at = utc_timestamp();
    m.write(*a.out_dir / "manifest.json");
  }
  std::cout << curve;
  if (!efficiency.empty()) std::cout << "\n" << efficiency;
  std::cout << "final_spearman " << csv::format_double(res.final_spearman) << "\n";
}

}  // namespace

void register_rank(CLI::App& app, GlobalOptions& g) {
  auto* rank = app.add_subcommand("rank", "Pairwise ranking tools");
  rank->require_subcommand(1);
  auto a = std::make_shared<SimulateArgs>();
  auto* sim = rank->add_subcommand("simulate", "Seeded synthetic study with Bradley-Terry raters");
  sim->add_option("--items", a->items, "Number of images")->capture_default_str();
  sim->add_option("--trials", a->trials, "Comparison budget")->capture_default_str();
  sim->add_option("--policy", a->policy, "active or random")->capture_default_str();
  sim->add_option("--stage-size", a->stage_size, "Comparisons per posterior refresh")->capture_default_str();
  sim->add_option("--latent-range", a->latent_range, "Spread of latent strengths in logits")->capture_default_str();
  sim->add_option("--repeat", a->repeat, "Also average both policies over this many seeds");
  sim->add_option("--out-dir", a->out_dir, "Directory for scores, curve, trials and manifest");
  sim->callback([a, &g] { run_simulate(*a, g); });
}

}  // namespace vcx::cli
