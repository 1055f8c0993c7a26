#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vcx {

/// Row-major 2-D sample grid; rows index y, columns index x.
template <typename Scalar>
using PlaneT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Plane = PlaneT<double>;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  constexpr std::uint32_t packed() const noexcept {
    return (std::uint32_t{r} << 16) | (std::uint32_t{g} << 8) | std::uint32_t{b};
  }
  static constexpr Rgb unpack(std::uint32_t v) noexcept {
    return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
            static_cast<std::uint8_t>(v)};
  }
  friend constexpr bool operator==(Rgb, Rgb) = default;
};

/// Decoded 8-bit RGB image, samples interleaved row-major.
class ImageRaster {
 public:
  ImageRaster(int width, int height, std::vector<std::uint8_t> samples, std::string id = {});

  static ImageRaster filled(int width, int height, Rgb color, std::string id = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  const std::string& id() const noexcept { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }

  Rgb at(int x, int y) const noexcept {
    const auto* p = &samples_[3 * (static_cast<std::size_t>(y) * width_ + x)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    auto* p = &samples_[3 * (static_cast<std::size_t>(y) * width_ + x)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  Rgb pixel(std::size_t index) const noexcept {
    const auto* p = &samples_[3 * index];
    return {p[0], p[1], p[2]};
  }

  /// One colour channel (0=R, 1=G, 2=B) as a double plane.
  Plane channel(int c) const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> samples_;
  std::string id_;
};

/// Luminance view; values lie in [0,255]. to_gray() produces integral values.
struct GrayRaster {
  Plane intensity;

  int width() const noexcept { return static_cast<int>(intensity.cols()); }
  int height() const noexcept { return static_cast<int>(intensity.rows()); }
};

struct Lab {
  double L = 0, a = 0, b = 0;
};

struct LabRaster {
  Plane L, a, b;

  int width() const noexcept { return static_cast<int>(L.cols()); }
  int height() const noexcept { return static_cast<int>(L.rows()); }
};

/// BT.601 luma, rounded to the nearest integer.
GrayRaster to_gray(const ImageRaster& img);

/// sRGB (D65) to CIELAB.
LabRaster to_lab(const ImageRaster& img);
Lab rgb_to_lab(Rgb c) noexcept;
/// Inverse conversion, clamped to the 8-bit gamut.
Rgb lab_to_rgb(const Lab& lab) noexcept;

/// CIE76 colour difference.
inline double delta_e76(const Lab& x, const Lab& y) noexcept {
  double dl = x.L - y.L, da = x.a - y.a, db = x.b - y.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

/// Level 0 is the input; level k is level k-1 blurred (sigma 1) and
/// decimated by two, so its size is ceil(w/2^k) x ceil(h/2^k).
/// Throws Errc::TooManyLevels when min(w,h) < 2^(levels-1).
std::vector<Plane> gaussian_pyramid(const Plane& plane, int levels);
std::vector<GrayRaster> gaussian_pyramid(const GrayRaster& img, int levels);

}  // namespace vcx
