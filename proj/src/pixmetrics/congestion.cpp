#include <cmath>
#include <numbers>
#include <numeric>

#include "vcx/error.hpp"
#include "vcx/filter.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

namespace {

constexpr double kVarianceWindowSigma = 2.0;
constexpr double kCenterSigma = 1.0;
constexpr double kSurroundSigma = 3.0;

Plane local_variance(const Plane& x) {
  Plane mean = gaussian_blur(x, kVarianceWindowSigma);
  Plane mean_sq = gaussian_blur(x.square().eval(), kVarianceWindowSigma);
  return (mean_sq - mean.square()).max(0.0);
}

}  // namespace

double FeatureEnergyMap::total() const noexcept { return std::accumulate(energy.begin(), energy.end(), 0.0); }

FeatureEnergyMap feature_energies(const ImageRaster& img, int scales) {
  if (std::min(img.width(), img.height()) < 16)
    throw Error(Errc::ImageTooSmall, "feature congestion needs min dimension >= 16");
  const LabRaster lab = to_lab(img);
  const auto L = gaussian_pyramid(lab.L, scales);
  const auto A = gaussian_pyramid(lab.a, scales);
  const auto B = gaussian_pyramid(lab.b, scales);

  FeatureEnergyMap map;
  map.scales = scales;
  for (int s = 0; s < scales; ++s) {
    const Plane var = local_variance(L[s]) + local_variance(A[s]) + local_variance(B[s]);
    map.energy[0] += var.sqrt().mean();

    const Plane dog = gaussian_blur(L[s], kCenterSigma) - gaussian_blur(L[s], kSurroundSigma);
    map.energy[1] += dog.abs().mean();

    // Steered Sobel responses; Sobel/8 is a unit-gain derivative and the
    // pyramid supplies the scale.
    const Gradient g = sobel(L[s]);
    for (int o = 0; o < 4; ++o) {
      const double theta = o * std::numbers::pi / 4.0;
      const Plane r = (g.gx * std::cos(theta) + g.gy * std::sin(theta)) / 8.0;
      map.energy[2 + o] += r.abs().mean();
    }
  }
  return map;
}

double feature_congestion(const FeatureEnergyMap& map) noexcept {
  const double total = map.total();
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double e : map.energy) {
    if (e <= 0.0) continue;
    const double p = e / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0) * std::log2(1.0 + total);
}

double metric_fc(const ImageRaster& img) { return feature_congestion(feature_energies(img)); }

}  // namespace vcx
