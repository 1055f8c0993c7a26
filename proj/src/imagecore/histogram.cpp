#include "vcx/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vcx/error.hpp"

namespace vcx {

double shannon_entropy(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) return 0.0;
  double h = 0.0;
  const double inv = 1.0 / static_cast<double>(total);
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) * inv;
    h -= p * std::log2(p);
  }
  // A single occupied bin yields -1*log2(1) = -0.0.
  return h <= 0.0 ? 0.0 : h;
}

std::vector<double> Histogram::probabilities() const {
  std::vector<double> p(bins.size(), 0.0);
  if (total == 0) return p;
  for (std::size_t i = 0; i < bins.size(); ++i) p[i] = static_cast<double>(bins[i]) / total;
  return p;
}

double Histogram::entropy_bits() const { return shannon_entropy(bins); }

Histogram Histogram::from_counts(std::vector<std::uint64_t> counts, std::string binning) {
  Histogram h;
  h.total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  h.bins = std::move(counts);
  h.binning = std::move(binning);
  return h;
}

Histogram Histogram::of_gray(const GrayRaster& gray) {
  std::vector<std::uint64_t> counts(256, 0);
  const auto& I = gray.intensity;
  for (Eigen::Index i = 0; i < I.size(); ++i) {
    int v = static_cast<int>(std::lround(I.data()[i]));
    ++counts[std::clamp(v, 0, 255)];
  }
  return from_counts(std::move(counts), "gray-256-unit");
}

Histogram Histogram::equal_width(std::span<const double> values, int nbins) {
  if (nbins < 1) throw Error(Errc::InvalidInput, "histogram needs at least one bin");
  std::vector<std::uint64_t> counts(nbins, 0);
  if (!values.empty()) {
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = (hi - lo) / nbins;
    for (double v : values) {
      int bin = width > 0 ? static_cast<int>((v - lo) / width) : 0;
      ++counts[std::clamp(bin, 0, nbins - 1)];
    }
  }
  return from_counts(std::move(counts), "equal-width-" + std::to_string(nbins));
}

}  // namespace vcx
