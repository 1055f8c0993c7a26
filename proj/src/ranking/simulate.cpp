#include <cmath>
#include <cstdio>
#include <random>

#include "vcx/correlation.hpp"
#include "vcx/error.hpp"
#include "vcx/ranking.hpp"

namespace vcx {

std::string_view to_string(SamplingPolicy p) noexcept { return p == SamplingPolicy::Active ? "active" : "random"; }

SamplingPolicy parse_policy(std::string_view s) {
  if (s == "active") return SamplingPolicy::Active;
  if (s == "random") return SamplingPolicy::Random;
  throw Error(Errc::InvalidInput, "unknown sampling policy '" + std::string(s) + "'");
}

namespace {

std::vector<IndexPair> random_pairs(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  PairSet seen;
  std::vector<IndexPair> out;
  const std::size_t possible = n * (n - 1) / 2;
  while (out.size() < k && seen.size() < possible) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const auto key = make_pair_key(i, j);
    if (seen.insert(key).second) out.push_back(key);
  }
  return out;
}

}  // namespace

SimulationResult simulate_study(const SimulationConfig& cfg) {
  if (cfg.items < 2) throw Error(Errc::NotEnoughImages, "simulation needs at least 2 items");
  if (cfg.stage_size < 1) throw Error(Errc::InvalidInput, "stage size must be >= 1");

  SimulationResult result;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < cfg.items; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "item-%04zu", i);
    ids.emplace_back(buf);
    result.latent.push_back(cfg.latent_range * static_cast<double>(i) / static_cast<double>(cfg.items - 1));
  }
  Ranker ranker(ids, cfg.ranking);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PairSet previous;
  const std::size_t possible = cfg.items * (cfg.items - 1) / 2;
  std::size_t done = 0;
  std::uint64_t trial_id = 0;
  while (done < cfg.trials) {
    const std::size_t batch = std::min({cfg.stage_size, cfg.trials - done, possible});
    std::vector<IndexPair> pairs;
    if (cfg.policy == SamplingPolicy::Active) {
      // Small item sets cannot avoid repeating the previous stage's pairs.
      const std::uint64_t seed = rng();
      pairs = select_pairs(ranker.states(), batch, previous, seed, cfg.ranking);
      if (pairs.size() < batch) pairs = select_pairs(ranker.states(), batch, {}, seed, cfg.ranking);
    } else {
      pairs = random_pairs(cfg.items, batch, rng);
    }
    if (pairs.empty()) break;

    std::vector<TrialRecord> trials;
    for (const auto& [a, b] : pairs) {
      const bool swap = unit(rng) < 0.5;
      const std::size_t left = swap ? b : a, right = swap ? a : b;
      const double p_left = 1.0 / (1.0 + std::exp(-(result.latent[left] - result.latent[right])));
      TrialRecord t;
      t.trial_id = ++trial_id;
      t.stage = ranker.next_stage();
      t.rater_id = "sim";
      t.left = ids[left];
      t.right = ids[right];
      t.choice = unit(rng) < p_left ? t.left : t.right;
      t.timestamp_ms = static_cast<std::int64_t>(trial_id);
      trials.push_back(t);
    }
    result.trials.insert(result.trials.end(), trials.begin(), trials.end());
    const StageReport report = ranker.run_stage(std::move(trials));
    done += pairs.size();
    previous = PairSet(pairs.begin(), pairs.end());
    result.curve.push_back({report.stage, done, spearman(ranker.means(), result.latent), report.pearson});
    if (report.converged && !result.converged_stage) result.converged_stage = report.stage;
  }
  result.scores = ranker.final_scores();
  result.final_spearman = result.curve.empty() ? 0.0 : result.curve.back().spearman_truth;
  return result;
}

PolicyCurve average_curve(SimulationConfig cfg, int repeats) {
  PolicyCurve curve;
  const std::uint64_t base = cfg.seed;
  for (int r = 0; r < repeats; ++r) {
    cfg.seed = base + static_cast<std::uint64_t>(r);
    const auto res = simulate_study(cfg);
    if (curve.trials.empty()) {
      for (const auto& p : res.curve) curve.trials.push_back(p.trials);
      curve.mean_spearman.assign(curve.trials.size(), 0.0);
    }
    const std::size_t m = std::min(curve.trials.size(), res.curve.size());
    for (std::size_t i = 0; i < m; ++i) curve.mean_spearman[i] += res.curve[i].spearman_truth / repeats;
  }
  return curve;
}

}  // namespace vcx
