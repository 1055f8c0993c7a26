#include <span>
#include <string>

#include "vcx/error.hpp"
#include "vcx/histogram.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

std::vector<Plane> haar_detail_subbands(const Plane& plane, int levels) {
  std::vector<Plane> bands;
  Plane approx = plane;
  for (int level = 0; level < levels; ++level) {
    const Eigen::Index rows = approx.rows() / 2, cols = approx.cols() / 2;
    if (rows < 1 || cols < 1) throw Error(Errc::ImageTooSmall, "subband decomposition exceeds image size");
    Plane ll(rows, cols), lh(rows, cols), hl(rows, cols), hh(rows, cols);
    for (Eigen::Index y = 0; y < rows; ++y) {
      for (Eigen::Index x = 0; x < cols; ++x) {
        const double a = approx(2 * y, 2 * x), b = approx(2 * y, 2 * x + 1);
        const double c = approx(2 * y + 1, 2 * x), d = approx(2 * y + 1, 2 * x + 1);
        ll(y, x) = (a + b + c + d) / 2;
        lh(y, x) = (a + b - c - d) / 2;
        hl(y, x) = (a - b + c - d) / 2;
        hh(y, x) = (a - b - c + d) / 2;
      }
    }
    bands.push_back(std::move(lh));
    bands.push_back(std::move(hl));
    bands.push_back(std::move(hh));
    approx = std::move(ll);
  }
  return bands;
}

double metric_se(const ImageRaster& img, const SubbandOptions& opts) {
  const int need = 1 << opts.levels;
  if (std::min(img.width(), img.height()) < need)
    throw Error(Errc::ImageTooSmall, "subband entropy needs min dimension >= " + std::to_string(need));
  const LabRaster lab = to_lab(img);
  double sum = 0;
  int count = 0;
  for (const Plane* channel : {&lab.L, &lab.a, &lab.b}) {
    for (const auto& band : haar_detail_subbands(*channel, opts.levels)) {
      std::span<const double> coeffs(band.data(), static_cast<std::size_t>(band.size()));
      sum += Histogram::equal_width(coeffs, opts.bins).entropy_bits();
      ++count;
    }
  }
  return sum / count;
}

}  // namespace vcx
