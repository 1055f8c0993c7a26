#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "vcx/image.hpp"

namespace vcx {

/// Normalised sampled Gaussian, radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Reflect-101 border: -1 -> 1, n -> n-2.
inline int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

/// Separable correlation with odd-length kernels, reflect-101 borders.
template <typename Derived>
PlaneT<typename Derived::Scalar> convolve_separable(const Eigen::ArrayBase<Derived>& src,
                                                    std::span<const double> kx,
                                                    std::span<const double> ky) {
  using Scalar = typename Derived::Scalar;
  const int rows = static_cast<int>(src.rows());
  const int cols = static_cast<int>(src.cols());
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);

  PlaneT<Scalar> tmp(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      Scalar acc(0);
      for (int k = -rx; k <= rx; ++k) acc += Scalar(kx[k + rx]) * src(y, reflect101(x + k, cols));
      tmp(y, x) = acc;
    }
  }
  PlaneT<Scalar> out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      Scalar acc(0);
      for (int k = -ry; k <= ry; ++k) acc += Scalar(ky[k + ry]) * tmp(reflect101(y + k, rows), x);
      out(y, x) = acc;
    }
  }
  return out;
}

template <typename Derived>
PlaneT<typename Derived::Scalar> gaussian_blur(const Eigen::ArrayBase<Derived>& src, double sigma) {
  auto k = gaussian_kernel(sigma);
  return convolve_separable(src, k, k);
}

/// Keeps even rows and columns.
template <typename Derived>
PlaneT<typename Derived::Scalar> decimate2(const Eigen::ArrayBase<Derived>& src) {
  const Eigen::Index rows = (src.rows() + 1) / 2;
  const Eigen::Index cols = (src.cols() + 1) / 2;
  PlaneT<typename Derived::Scalar> out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y)
    for (Eigen::Index x = 0; x < cols; ++x) out(y, x) = src(2 * y, 2 * x);
  return out;
}

struct Gradient {
  Plane gx, gy;
};

/// 3x3 Sobel derivatives (d/dx along columns, d/dy along rows).
Gradient sobel(const Plane& src);

}  // namespace vcx
