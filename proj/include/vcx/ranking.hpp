#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace vcx {

struct RankingConfig {
  double mu0 = 25.0;
  double sigma0 = 25.0 / 3.0;
  double beta = 25.0 / 6.0;
  double tau = 25.0 / 300.0;
  int stage_pair_count = 79;
  int raters_per_stage = 20;
  /// Stopping rule: Pearson to the previous stage above `convergence_r` for
  /// `convergence_stages` consecutive counted stages.
  double convergence_r = 0.95;
  int convergence_stages = 3;
};

struct RatingState {
  double mu = 25.0;
  double sigma = 25.0 / 3.0;
  std::uint64_t comparisons = 0;
};

/// Truncated-Gaussian correction factors for a win with normalised margin t.
double skill_v(double t) noexcept;
double skill_w(double t) noexcept;

/// Moment-matching update for a decisive outcome; returns (winner, loser).
std::pair<RatingState, RatingState> update_pair(const RatingState& winner, const RatingState& loser,
                                                const RankingConfig& cfg);

/// Unordered image-index pair, stored with first < second.
using IndexPair = std::pair<std::size_t, std::size_t>;
inline IndexPair make_pair_key(std::size_t i, std::size_t j) { return i < j ? IndexPair{i, j} : IndexPair{j, i}; }
using PairSet = std::set<IndexPair>;

/// Expected-information score h(P(i beats j)) * (sigma_i^2 + sigma_j^2).
double pair_information(const RatingState& a, const RatingState& b, const RankingConfig& cfg);

/// Greedy batch of up to k distinct pairs by descending information score,
/// at most ceil(2k/n)+1 appearances per image, skipping `exclusions`.
/// Equal scores are ordered by a seeded random key. Fewer than k pairs are
/// returned only when the constraints leave no admissible pair.
std::vector<IndexPair> select_pairs(std::span<const RatingState> states, std::size_t k, const PairSet& exclusions,
                                    std::uint64_t seed, const RankingConfig& cfg = {});

struct TrialRecord {
  std::uint64_t trial_id = 0;
  int stage = 0;
  std::string session_id;
  std::string rater_id;
  std::string left;
  std::string right;
  std::string choice;
  double latency = 1.0;
  bool attention = false;
  /// Set for trials of rejected or voided sessions.
  bool excluded = false;
  std::int64_t timestamp_ms = 0;

  const std::string& loser() const { return choice == left ? right : left; }
};

/// Win counts: entry (i, j) = times i was judged more complex than j.
using ComparisonMatrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct StageReport {
  int stage = 0;
  std::vector<double> scores;
  double pearson = 1.0;
  double spearman = 1.0;
  std::size_t valid_trials = 0;
  /// Stages without valid trials neither count toward nor reset the streak.
  bool counted = false;
  int streak = 0;
  bool converged = false;
};

struct ScoreRow {
  std::string image_id;
  double mu = 0;
  double sigma = 0;
  std::uint64_t comparisons = 0;
  double normalized = 0;
};

/// Single-writer inference engine over a fixed image set.
class Ranker {
 public:
  Ranker(std::vector<std::string> image_ids, RankingConfig cfg = {});

  /// Validates every trial first (Errc::UnknownImage leaves state untouched),
  /// then applies non-attention, non-excluded trials in timestamp order.
  StageReport run_stage(std::vector<TrialRecord> trials);

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<RatingState>& states() const noexcept { return states_; }
  const ComparisonMatrix& matrix() const noexcept { return matrix_; }
  const RankingConfig& config() const noexcept { return cfg_; }
  const std::vector<StageReport>& history() const noexcept { return history_; }
  int next_stage() const noexcept { return static_cast<int>(history_.size()); }
  bool converged() const noexcept { return !history_.empty() && history_.back().converged; }
  std::uint64_t total_updates() const noexcept { return updates_; }

  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  std::vector<double> means() const;

  /// Posterior means plus their min-max normalised form; Errc::NoTrials
  /// before the first update.
  std::vector<ScoreRow> final_scores() const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  RankingConfig cfg_;
  std::vector<RatingState> states_;
  ComparisonMatrix matrix_;
  std::vector<StageReport> history_;
  std::vector<double> snapshot_;
  int streak_ = 0;
  std::uint64_t updates_ = 0;
};

/// CSV with header image_id,mu,sigma,n_comparisons,normalized_score.
std::string scores_csv(std::span<const ScoreRow> rows);

// Trial log: one JSON object per line; non-trial record types are skipped.
std::string trial_to_json(const TrialRecord& t);
TrialRecord trial_from_json(std::string_view line);
void append_trial(std::ostream& out, const TrialRecord& t);
std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path);

// --- simulation -------------------------------------------------------------

enum class SamplingPolicy { Active, Random };
std::string_view to_string(SamplingPolicy p) noexcept;
SamplingPolicy parse_policy(std::string_view s);

struct SimulationConfig {
  std::size_t items = 100;
  std::size_t trials = 742;
  SamplingPolicy policy = SamplingPolicy::Active;
  std::uint64_t seed = 1;
  /// Comparisons answered between posterior refreshes.
  std::size_t stage_size = 79;
  /// Latent Bradley-Terry strengths are evenly spaced over [0, latent_range] logits.
  double latent_range = 10.0;
  RankingConfig ranking;
};

struct SimulationPoint {
  int stage = 0;
  std::size_t trials = 0;
  double spearman_truth = 0;
  double pearson_prev = 0;
};

struct SimulationResult {
  std::vector<double> latent;
  std::vector<ScoreRow> scores;
  std::vector<SimulationPoint> curve;
  std::vector<TrialRecord> trials;
  double final_spearman = 0;
  /// First stage whose report met the stopping rule.
  std::optional<int> converged_stage;
};

/// Seeded synthetic study with Bradley-Terry raters.
SimulationResult simulate_study(const SimulationConfig& cfg);

struct PolicyCurve {
  std::vector<std::size_t> trials;
  std::vector<double> mean_spearman;
};

/// Mean Spearman-to-truth curve over seeds seed, seed+1, ..., seed+repeats-1.
PolicyCurve average_curve(SimulationConfig cfg, int repeats);

}  // namespace vcx
