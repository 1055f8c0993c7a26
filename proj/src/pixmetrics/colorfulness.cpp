#include <cmath>

#include "vcx/metrics.hpp"

namespace vcx {

double metric_cf(const ImageRaster& img, double kappa) {
  const double n = static_cast<double>(img.pixel_count());
  double sum_rg = 0, sum_yb = 0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const Rgb c = img.pixel(i);
    sum_rg += double(c.r) - c.g;
    sum_yb += 0.5 * (double(c.r) + c.g) - c.b;
  }
  const double mu_rg = sum_rg / n, mu_yb = sum_yb / n;
  double ss_rg = 0, ss_yb = 0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const Rgb c = img.pixel(i);
    const double rg = double(c.r) - c.g - mu_rg;
    const double yb = 0.5 * (double(c.r) + c.g) - c.b - mu_yb;
    ss_rg += rg * rg;
    ss_yb += yb * yb;
  }
  return std::sqrt(ss_rg / n + ss_yb / n) + kappa * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb);
}

}  // namespace vcx
