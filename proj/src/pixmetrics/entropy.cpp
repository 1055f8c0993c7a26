#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "vcx/error.hpp"
#include "vcx/histogram.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

double metric_ie(const ImageRaster& img) { return Histogram::of_gray(to_gray(img)).entropy_bits(); }

double metric_ergb(const ImageRaster& img) {
  std::vector<std::uint32_t> colors(img.pixel_count());
  for (std::size_t i = 0; i < colors.size(); ++i) colors[i] = img.pixel(i).packed();
  std::sort(colors.begin(), colors.end());
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < colors.size();) {
    std::size_t j = i;
    while (j < colors.size() && colors[j] == colors[i]) ++j;
    counts.push_back(j - i);
    i = j;
  }
  return shannon_entropy(counts);
}

namespace {

constexpr int kIgBins = 64;

int quantize64(Rgb c) noexcept { return ((c.r >> 6) << 4) | ((c.g >> 6) << 2) | (c.b >> 6); }

}  // namespace

double metric_ig(const ImageRaster& img) {
  if (img.width() < 2 || img.height() < 2)
    throw Error(Errc::ImageTooSmall, "information gain needs at least 2x2 pixels");
  const int w = img.width(), h = img.height();
  std::vector<int> q(img.pixel_count());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = quantize64(img.pixel(i));

  // Joint counts over ordered (cell, 4-neighbour) pairs.
  std::array<std::uint64_t, kIgBins * kIgBins> joint{};
  std::uint64_t total = 0;
  constexpr int dx[] = {1, -1, 0, 0};
  constexpr int dy[] = {0, 0, 1, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int ci = q[static_cast<std::size_t>(y) * w + x];
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        ++joint[ci * kIgBins + q[static_cast<std::size_t>(ny) * w + nx]];
        ++total;
      }
    }
  }
  std::array<std::uint64_t, kIgBins> marginal{};
  for (int i = 0; i < kIgBins; ++i)
    for (int j = 0; j < kIgBins; ++j) marginal[i] += joint[i * kIgBins + j];

  double gain = 0.0;
  for (int i = 0; i < kIgBins; ++i) {
    if (marginal[i] == 0) continue;
    for (int j = 0; j < kIgBins; ++j) {
      const auto n = joint[i * kIgBins + j];
      if (n == 0) continue;
      const double p_ij = static_cast<double>(n) / total;
      const double p_cond = static_cast<double>(n) / marginal[i];
      gain -= p_ij * std::log2(p_cond);
    }
  }
  return gain <= 0.0 ? 0.0 : gain;
}

}  // namespace vcx
