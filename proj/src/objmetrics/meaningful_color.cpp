#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "vcx/error.hpp"
#include "vcx/objects.hpp"

namespace vcx {

namespace {

struct NameTally {
  std::uint64_t count = 0;
  double L = 0, a = 0, b = 0;
};

// Names every distinct colour once, then accumulates per-name pixel counts
// and Lab sums.
std::unordered_map<std::size_t, NameTally> tally_names(const ImageRaster& img, const ColorDictionary& dict,
                                                       const std::optional<TextBox>& region) {
  if (dict.empty()) throw Error(Errc::EmptyDictionary, "colour dictionary is empty");
  int x0 = 0, y0 = 0, x1 = img.width(), y1 = img.height();
  if (region) {
    const auto& r = *region;
    if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1 || r.x + r.w > img.width() || r.y + r.h > img.height())
      throw Error(Errc::BoxOutOfBounds, "colour-count region exceeds image bounds");
    x0 = r.x, y0 = r.y, x1 = r.x + r.w, y1 = r.y + r.h;
  }
  std::unordered_map<std::uint32_t, std::uint64_t> colors;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) ++colors[img.at(x, y).packed()];

  std::unordered_map<std::size_t, NameTally> out;
  for (const auto& [packed, count] : colors) {
    const Lab lab = rgb_to_lab(Rgb::unpack(packed));
    auto& t = out[dict.nearest(lab)];
    t.count += count;
    t.L += lab.L * count;
    t.a += lab.a * count;
    t.b += lab.b * count;
  }
  return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

std::map<std::string, std::uint64_t> name_colors(const ImageRaster& img, const ColorDictionary& dict) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [idx, t] : tally_names(img, dict, std::nullopt)) out[dict.entry(idx).name] = t.count;
  return out;
}

MecReport metric_mec(const ImageRaster& img, const ColorDictionary& dict, const MecOptions& opts) {
  if (!(opts.delta_e_max > 0)) throw Error(Errc::InvalidInput, "delta_e_max must be positive");
  if (opts.min_share < 0 || opts.min_share >= 1) throw Error(Errc::InvalidInput, "min_share must lie in [0,1)");
  const auto tallies = tally_names(img, dict, opts.region);

  struct Named {
    std::size_t entry;
    std::uint64_t count;
    Lab centroid;
  };
  std::vector<Named> all;
  std::uint64_t total = 0;
  for (const auto& [idx, t] : tallies) {
    const double n = static_cast<double>(t.count);
    all.push_back({idx, t.count, {t.L / n, t.a / n, t.b / n}});
    total += t.count;
  }
  // Deterministic order independent of hashing.
  std::sort(all.begin(), all.end(), [&](const Named& x, const Named& y) {
    return dict.entry(x.entry).name < dict.entry(y.entry).name;
  });

  MecReport report;
  report.named_count = all.size();

  std::vector<Named> kept;
  for (const auto& n : all)
    if (static_cast<double>(n.count) / total >= opts.min_share) kept.push_back(n);
  if (kept.empty()) {
    kept.push_back(*std::max_element(all.begin(), all.end(),
                                     [](const Named& x, const Named& y) { return x.count < y.count; }));
  }
  report.namable_count = kept.size();

  // Single linkage: same similarity group, or centroids within delta_e_max.
  std::vector<std::size_t> parent(kept.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      const bool same_group = dict.entry(kept[i].entry).group == dict.entry(kept[j].entry).group;
      if (same_group || delta_e76(kept[i].centroid, kept[j].centroid) <= opts.delta_e_max)
        parent[find_root(parent, i)] = find_root(parent, j);
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < kept.size(); ++i) groups[find_root(parent, i)].push_back(i);

  for (const auto& [root, members] : groups) {
    double n = 0, L = 0, a = 0, b = 0;
    for (auto m : members) {
      const double c = static_cast<double>(kept[m].count);
      n += c;
      L += kept[m].centroid.L * c;
      a += kept[m].centroid.a * c;
      b += kept[m].centroid.b * c;
    }
    const Lab centroid{L / n, a / n, b / n};
    std::size_t rep = members.front();
    double rep_d = std::numeric_limits<double>::infinity();
    for (auto m : members) {
      const double d = delta_e76(dict.entry(kept[m].entry).lab, centroid);
      if (d < rep_d) {
        rep = m;
        rep_d = d;
      }
    }
    MecCluster cluster;
    cluster.representative = dict.entry(kept[rep].entry).name;
    cluster.color = dict.entry(kept[rep].entry).rgb;
    cluster.share = n / static_cast<double>(total);
    for (auto m : members) cluster.members.push_back(dict.entry(kept[m].entry).name);
    report.clusters.push_back(std::move(cluster));
  }
  std::sort(report.clusters.begin(), report.clusters.end(), [](const MecCluster& x, const MecCluster& y) {
    return x.share != y.share ? x.share > y.share : x.representative < y.representative;
  });
  report.merged_count = report.clusters.size();
  return report;
}

}  // namespace vcx
