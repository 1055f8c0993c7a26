#include <cmath>
#include <numbers>
#include <vector>

#include "vcx/error.hpp"
#include "vcx/filter.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

namespace {

// Neighbour offsets for the four quantised gradient directions
// (0, 45, 90, 135 degrees).
constexpr int kDirDx[4] = {1, 1, 0, -1};
constexpr int kDirDy[4] = {0, 1, 1, 1};

int quantize_direction(double gx, double gy) {
  double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
  if (angle < 0) angle += 180.0;
  if (angle < 22.5 || angle >= 157.5) return 0;
  if (angle < 67.5) return 1;
  if (angle < 112.5) return 2;
  return 3;
}

}  // namespace

PlaneT<std::uint8_t> canny_edges(const GrayRaster& gray, const CannyOptions& opts) {
  const int w = gray.width(), h = gray.height();
  const Gradient g = sobel(gaussian_blur(gray.intensity, opts.sigma));
  const Plane mag = (g.gx.square() + g.gy.square()).sqrt();

  PlaneT<std::uint8_t> edges = PlaneT<std::uint8_t>::Zero(h, w);
  const double max_mag = mag.maxCoeff();
  if (!(max_mag > 0)) return edges;

  // Non-maximum suppression. A pixel must beat its backward neighbour
  // strictly and match its forward neighbour, so a symmetric two-pixel ridge
  // keeps exactly one side.
  Plane thin = Plane::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mag(y, x);
      if (m <= 0) continue;
      const int d = quantize_direction(g.gx(y, x), g.gy(y, x));
      const double fwd = mag(reflect101(y + kDirDy[d], h), reflect101(x + kDirDx[d], w));
      const double back = mag(reflect101(y - kDirDy[d], h), reflect101(x - kDirDx[d], w));
      if (m > back && m >= fwd) thin(y, x) = m;
    }
  }

  const double high = opts.high_ratio * max_mag;
  const double low = opts.low_ratio * max_mag;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (thin(y, x) >= high) {
        edges(y, x) = 1;
        stack.emplace_back(x, y);
      }
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h || edges(ny, nx)) continue;
        if (thin(ny, nx) >= low && thin(ny, nx) > 0) {
          edges(ny, nx) = 1;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }
  return edges;
}

double metric_ed(const ImageRaster& img, const CannyOptions& opts) {
  if (std::min(img.width(), img.height()) < 3) throw Error(Errc::ImageTooSmall, "edge density needs min dimension >= 3");
  const auto edges = canny_edges(to_gray(img), opts);
  return edges.cast<double>().sum() / static_cast<double>(img.pixel_count());
}

}  // namespace vcx
