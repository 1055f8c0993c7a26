#include <algorithm>
#include <random>

#include "vcx/error.hpp"
#include "vcx/ranking.hpp"

namespace vcx {

std::vector<IndexPair> select_pairs(std::span<const RatingState> states, std::size_t k, const PairSet& exclusions,
                                    std::uint64_t seed, const RankingConfig& cfg) {
  const std::size_t n = states.size();
  if (n < 2) throw Error(Errc::NotEnoughImages, "pair selection needs at least 2 images");
  if (k == 0) return {};

  struct Candidate {
    double score;
    std::uint64_t key;
    IndexPair pair;
  };
  std::mt19937_64 rng(seed);
  std::vector<Candidate> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::uint64_t key = rng();
      if (exclusions.count({i, j})) continue;
      candidates.push_back({pair_information(states[i], states[j], cfg), key, {i, j}});
    }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.score != b.score ? a.score > b.score : a.key < b.key;
  });

  const std::size_t cap = (2 * k + n - 1) / n + 1;
  std::vector<std::size_t> used(n, 0);
  std::vector<IndexPair> out;
  for (const auto& c : candidates) {
    if (out.size() == k) break;
    if (used[c.pair.first] >= cap || used[c.pair.second] >= cap) continue;
    ++used[c.pair.first];
    ++used[c.pair.second];
    out.push_back(c.pair);
  }
  return out;
}

}  // namespace vcx
