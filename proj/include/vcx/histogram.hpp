#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vcx/image.hpp"

namespace vcx {

struct Histogram {
  std::vector<std::uint64_t> bins;
  std::uint64_t total = 0;
  std::string binning;

  std::vector<double> probabilities() const;
  /// -sum p log2 p with 0 log 0 = 0.
  double entropy_bits() const;

  /// 256 bins, one per integral intensity.
  static Histogram of_gray(const GrayRaster& gray);
  /// `nbins` equal-width bins spanning [min, max] of the values; the maximum
  /// falls in the last bin. A constant input lands entirely in bin 0.
  static Histogram equal_width(std::span<const double> values, int nbins);
  static Histogram from_counts(std::vector<std::uint64_t> counts, std::string binning);
};

double shannon_entropy(std::span<const std::uint64_t> counts);

}  // namespace vcx
