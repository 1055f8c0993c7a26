#pragma once

#include <span>
#include <vector>

namespace vcx {

/// Pearson r. Identical inputs give 1; otherwise a zero-variance input gives 0.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson r of average ranks (ties share the mean rank).
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based average ranks.
std::vector<double> average_ranks(std::span<const double> x);

}  // namespace vcx
