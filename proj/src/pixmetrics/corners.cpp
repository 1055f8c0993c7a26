#include "vcx/error.hpp"
#include "vcx/filter.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

Plane harris_response(const GrayRaster& gray, const HarrisOptions& opts) {
  const Gradient g = sobel(gray.intensity);
  const Plane ixx = gaussian_blur((g.gx * g.gx).eval(), opts.window_sigma);
  const Plane iyy = gaussian_blur((g.gy * g.gy).eval(), opts.window_sigma);
  const Plane ixy = gaussian_blur((g.gx * g.gy).eval(), opts.window_sigma);
  const Plane trace = ixx + iyy;
  return ixx * iyy - ixy * ixy - opts.k * trace * trace;
}

std::vector<std::pair<int, int>> harris_corners(const GrayRaster& gray, const HarrisOptions& opts) {
  const Plane r = harris_response(gray, opts);
  const int w = gray.width(), h = gray.height();
  std::vector<std::pair<int, int>> corners;
  const double max_r = r.maxCoeff();
  if (!(max_r > 0)) return corners;
  const double threshold = opts.threshold_ratio * max_r;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = r(y, x);
      if (v <= threshold) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const double nv = r(ny, nx);
          // On a plateau the first pixel in raster order wins.
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (nv > v || (earlier && nv == v)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) corners.emplace_back(x, y);
    }
  }
  return corners;
}

double metric_fp(const ImageRaster& img, const HarrisOptions& opts) {
  if (std::min(img.width(), img.height()) < 7)
    throw Error(Errc::ImageTooSmall, "feature-point density needs min dimension >= 7");
  const auto corners = harris_corners(to_gray(img), opts);
  return static_cast<double>(corners.size()) / static_cast<double>(img.pixel_count());
}

}  // namespace vcx
