#include <algorithm>
#include <cmath>

#include "vcx/error.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

Eigen::MatrixXd glcm(const GrayRaster& gray, int levels, int dx, int dy) {
  if (levels < 2 || levels > 256) throw Error(Errc::InvalidInput, "GLCM levels must lie in [2,256]");
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(levels, levels);
  const int w = gray.width(), h = gray.height();
  auto quantize = [&](double v) {
    return std::clamp(static_cast<int>(std::lround(v)) * levels / 256, 0, levels - 1);
  };
  double pairs = 0;
  for (int y = 0; y < h; ++y) {
    const int ny = y + dy;
    if (ny < 0 || ny >= h) continue;
    for (int x = 0; x < w; ++x) {
      const int nx = x + dx;
      if (nx < 0 || nx >= w) continue;
      const int i = quantize(gray.intensity(y, x));
      const int j = quantize(gray.intensity(ny, nx));
      P(i, j) += 1;
      P(j, i) += 1;
      pairs += 2;
    }
  }
  // A one-pixel-wide image has no horizontal pairs; treat it as pure
  // self-co-occurrence.
  if (pairs == 0) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int i = quantize(gray.intensity(y, x));
        P(i, i) += 1;
        pairs += 1;
      }
  }
  return P / pairs;
}

double metric_h(const ImageRaster& img, bool inverted) {
  const Eigen::MatrixXd P = glcm(to_gray(img));
  double h = 0;
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      const double d = static_cast<double>(i - j);
      h += P(i, j) / (1.0 + d * d);
    }
  return inverted ? 1.0 - h : h;
}

}  // namespace vcx
