#include <algorithm>
#include <numeric>

#include "vcx/correlation.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/ranking.hpp"

namespace vcx {

Ranker::Ranker(std::vector<std::string> image_ids, RankingConfig cfg) : ids_(std::move(image_ids)), cfg_(cfg) {
  if (!(cfg_.beta > 0) || cfg_.tau < 0 || cfg_.stage_pair_count < 1 || !(cfg_.sigma0 > 0))
    throw Error(Errc::InvalidInput, "ranking config needs beta > 0, tau >= 0, sigma0 > 0, stage_pair_count >= 1");
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (!index_.emplace(ids_[i], i).second) throw Error(Errc::InvalidInput, "duplicate image id '" + ids_[i] + "'");
  states_.assign(ids_.size(), RatingState{cfg_.mu0, cfg_.sigma0, 0});
  matrix_ = ComparisonMatrix::Zero(static_cast<Eigen::Index>(ids_.size()), static_cast<Eigen::Index>(ids_.size()));
  snapshot_ = means();
}

std::optional<std::size_t> Ranker::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Ranker::index_of(std::string_view id) const {
  auto i = find(id);
  if (!i) throw Error(Errc::UnknownImage, "unknown image id '" + std::string(id) + "'");
  return *i;
}

std::vector<double> Ranker::means() const {
  std::vector<double> out(states_.size());
  std::transform(states_.begin(), states_.end(), out.begin(), [](const RatingState& s) { return s.mu; });
  return out;
}

StageReport Ranker::run_stage(std::vector<TrialRecord> trials) {
  for (const auto& t : trials) {
    if (t.attention || t.excluded) continue;
    const std::size_t a = index_of(t.left), b = index_of(t.right);
    if (a == b) throw Error(Errc::InvalidInput, "trial " + std::to_string(t.trial_id) + " compares an image to itself");
    if (t.choice != t.left && t.choice != t.right)
      throw Error(Errc::InvalidChoice, "trial " + std::to_string(t.trial_id) + " choice is not in its pair");
  }
  std::stable_sort(trials.begin(), trials.end(), [](const TrialRecord& x, const TrialRecord& y) {
    return x.timestamp_ms != y.timestamp_ms ? x.timestamp_ms < y.timestamp_ms : x.trial_id < y.trial_id;
  });

  StageReport report;
  report.stage = next_stage();
  for (const auto& t : trials) {
    if (t.attention || t.excluded) continue;
    const std::size_t w = index_of(t.choice), l = index_of(t.loser());
    std::tie(states_[w], states_[l]) = update_pair(states_[w], states_[l], cfg_);
    ++matrix_(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(l));
    ++report.valid_trials;
    ++updates_;
  }

  report.scores = means();
  report.pearson = pearson(report.scores, snapshot_);
  report.spearman = spearman(report.scores, snapshot_);
  report.counted = report.valid_trials > 0;
  if (report.counted) streak_ = report.pearson > cfg_.convergence_r ? streak_ + 1 : 0;
  report.streak = streak_;
  report.converged = streak_ >= cfg_.convergence_stages;
  snapshot_ = report.scores;
  history_.push_back(report);
  return report;
}

std::vector<ScoreRow> Ranker::final_scores() const {
  if (updates_ == 0) throw Error(Errc::NoTrials, "no comparisons have been applied");
  std::vector<ScoreRow> rows(ids_.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : states_) {
    lo = std::min(lo, s.mu);
    hi = std::max(hi, s.mu);
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    rows[i] = {ids_[i], states_[i].mu, states_[i].sigma, states_[i].comparisons,
               hi > lo ? (states_[i].mu - lo) / (hi - lo) : 0.0};
  }
  return rows;
}

std::string scores_csv(std::span<const ScoreRow> rows) {
  std::string out = "image_id,mu,sigma,n_comparisons,normalized_score\n";
  for (const auto& r : rows) {
    out += csv::join({r.image_id, csv::format_double(r.mu), csv::format_double(r.sigma),
                      std::to_string(r.comparisons), csv::format_double(r.normalized)});
    out += '\n';
  }
  return out;
}

}  // namespace vcx
