#include "vcx/filter.hpp"

#include <string>

#include "vcx/error.hpp"

namespace vcx {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

Gradient sobel(const Plane& src) {
  static constexpr double smooth[] = {1.0, 2.0, 1.0};
  static constexpr double diff[] = {-1.0, 0.0, 1.0};
  return {convolve_separable(src, diff, smooth), convolve_separable(src, smooth, diff)};
}

std::vector<Plane> gaussian_pyramid(const Plane& plane, int levels) {
  if (levels < 1) throw Error(Errc::InvalidInput, "pyramid needs at least one level");
  const Eigen::Index min_dim = std::min(plane.rows(), plane.cols());
  if (levels > 31 || min_dim < (Eigen::Index{1} << (levels - 1)))
    throw Error(Errc::TooManyLevels, std::to_string(levels) + " pyramid levels exceed image size");
  std::vector<Plane> out;
  out.reserve(levels);
  out.push_back(plane);
  for (int k = 1; k < levels; ++k) out.push_back(decimate2(gaussian_blur(out.back(), 1.0)));
  return out;
}

std::vector<GrayRaster> gaussian_pyramid(const GrayRaster& img, int levels) {
  std::vector<GrayRaster> out;
  for (auto& p : gaussian_pyramid(img.intensity, levels)) out.push_back(GrayRaster{std::move(p)});
  return out;
}

}  // namespace vcx
