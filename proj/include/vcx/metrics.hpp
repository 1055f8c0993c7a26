#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcx/image.hpp"
#include "vcx/metric_names.hpp"
#include "vcx/objects.hpp"

namespace vcx {

// --- information-theoretic -------------------------------------------------

/// Grayscale Shannon entropy over 256 intensity bins, in bits.
double metric_ie(const ImageRaster& img);

/// Compressor used for O.KC (zlib/deflate at the given level).
inline constexpr int kDefaultCompressionLevel = 9;
std::string_view kc_compressor_name();
/// Byte length of the raw RGB buffer after lossless compression.
double metric_kc(const ImageRaster& img, int level = kDefaultCompressionLevel);

struct SubbandOptions {
  int levels = 3;
  int bins = 16;
};
/// Mean Shannon entropy of detail-coefficient histograms over all Haar
/// subbands (LH, HL, HH at each level) of the L, a and b channels.
/// Requires min(w,h) >= 2^levels.
double metric_se(const ImageRaster& img, const SubbandOptions& opts = {});

/// All detail subbands of an orthonormal 2-D Haar decomposition, ordered
/// level-major then (LH, HL, HH). Odd trailing rows/columns are dropped.
std::vector<Plane> haar_detail_subbands(const Plane& plane, int levels);

/// Mean information gain (conditional entropy of a 4-neighbour's colour
/// given the cell colour) with 4x4x4 RGB quantisation.
double metric_ig(const ImageRaster& img);

// --- clutter ---------------------------------------------------------------

inline constexpr std::size_t kFeatureChannels = 6;
inline constexpr std::array<std::string_view, kFeatureChannels> kFeatureNames = {
    "color-variance", "luminance-contrast", "orient-0", "orient-45", "orient-90", "orient-135"};

struct FeatureEnergyMap {
  std::array<double, kFeatureChannels> energy{};
  int scales = 3;

  double total() const noexcept;
};

FeatureEnergyMap feature_energies(const ImageRaster& img, int scales = 3);

/// Entropy of the normalised feature-energy distribution scaled by
/// log2(1 + total energy). Zero when there is no energy.
double metric_fc(const ImageRaster& img);

/// Feature congestion from precomputed energies.
double feature_congestion(const FeatureEnergyMap& map) noexcept;

inline constexpr int kGlcmLevels = 64;

/// Symmetrised, normalised co-occurrence matrix for offset (dx, dy).
Eigen::MatrixXd glcm(const GrayRaster& gray, int levels = kGlcmLevels, int dx = 1, int dy = 0);

/// sum P(i,j) / (1 + (i-j)^2) over the 64-level horizontal GLCM. With
/// `inverted` the complement 1 - value is returned instead.
double metric_h(const ImageRaster& img, bool inverted = false);

// --- colour ----------------------------------------------------------------

inline constexpr double kColorfulnessWeight = 0.3;
double metric_cf(const ImageRaster& img, double kappa = kColorfulnessWeight);

/// Shannon entropy over exact 24-bit colours.
double metric_ergb(const ImageRaster& img);

// --- shape -----------------------------------------------------------------

struct CannyOptions {
  double sigma = 1.4;
  double low_ratio = 0.10;
  double high_ratio = 0.30;
};
PlaneT<std::uint8_t> canny_edges(const GrayRaster& gray, const CannyOptions& opts = {});
double metric_ed(const ImageRaster& img, const CannyOptions& opts = {});

struct HarrisOptions {
  double k = 0.04;
  double window_sigma = 1.0;
  double threshold_ratio = 0.01;
};
Plane harris_response(const GrayRaster& gray, const HarrisOptions& opts = {});
/// (x, y) of suppressed response maxima above the threshold, raster order.
std::vector<std::pair<int, int>> harris_corners(const GrayRaster& gray, const HarrisOptions& opts = {});
double metric_fp(const ImageRaster& img, const HarrisOptions& opts = {});

// --- fan-out ---------------------------------------------------------------

struct MetricOptions {
  int kc_level = kDefaultCompressionLevel;
  TirMode tir_mode = TirMode::Ink;
  bool invert_h = false;
  MecOptions mec;
  /// When set, only these metrics are computed; the rest stay NaN.
  std::optional<std::set<Metric>> only;

  bool wants(Metric m) const { return !only || only->count(m) > 0; }
};

struct MetricVector {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::array<double, kMetricCount> values;
  /// Set when O.TiR was requested but no text boxes were supplied.
  bool tir_missing = false;
  TirMode tir_mode = TirMode::Ink;

  MetricVector() { values.fill(std::numeric_limits<double>::quiet_NaN()); }

  double& operator[](Metric m) noexcept { return values[static_cast<std::size_t>(m)]; }
  double operator[](Metric m) const noexcept { return values[static_cast<std::size_t>(m)]; }
};

/// Computes every requested metric in column order; the first failure is
/// rethrown as MetricError naming the metric.
MetricVector compute_all(const ImageRaster& img, const TextBoxSet* boxes, const ColorDictionary* dict,
                         const MetricOptions& opts = {});

/// Min-max normalisation of each metric over a catalog; NaN stays NaN and a
/// constant column maps to 0.
std::vector<std::array<double, kMetricCount>> normalize_catalog(std::span<const MetricVector> rows);

}  // namespace vcx
