#include <algorithm>
#include <cmath>
#include <numbers>

#include "vcx/ranking.hpp"

namespace vcx {

namespace {

double normal_pdf(double t) noexcept { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double t) noexcept { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

}  // namespace

double skill_v(double t) noexcept {
  const double denom = normal_cdf(t);
  // Deep in the lower tail phi/Phi tends to -t.
  if (denom < 1e-300) return -t;
  return normal_pdf(t) / denom;
}

double skill_w(double t) noexcept {
  const double v = skill_v(t);
  return v * (v + t);
}

std::pair<RatingState, RatingState> update_pair(const RatingState& winner, const RatingState& loser,
                                                const RankingConfig& cfg) {
  const double tau2 = cfg.tau * cfg.tau;
  const double var_w = winner.sigma * winner.sigma + tau2;
  const double var_l = loser.sigma * loser.sigma + tau2;
  const double c2 = 2.0 * cfg.beta * cfg.beta + var_w + var_l;
  const double c = std::sqrt(c2);
  const double t = (winner.mu - loser.mu) / c;
  const double v = skill_v(t), w = skill_w(t);

  RatingState w_out = winner, l_out = loser;
  w_out.mu = winner.mu + var_w / c * v;
  l_out.mu = loser.mu - var_l / c * v;
  w_out.sigma = std::sqrt(var_w * std::max(1.0 - var_w / c2 * w, 1e-12));
  l_out.sigma = std::sqrt(var_l * std::max(1.0 - var_l / c2 * w, 1e-12));
  ++w_out.comparisons;
  ++l_out.comparisons;
  return {w_out, l_out};
}

double pair_information(const RatingState& a, const RatingState& b, const RankingConfig& cfg) {
  const double var = a.sigma * a.sigma + b.sigma * b.sigma;
  const double c = std::sqrt(2.0 * cfg.beta * cfg.beta + var);
  const double p = normal_cdf((a.mu - b.mu) / c);
  double h = 0.0;
  if (p > 0.0 && p < 1.0) h = -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
  return h * var;
}

}  // namespace vcx
