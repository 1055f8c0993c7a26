#include <algorithm>
#include <array>
#include <cmath>

#include "vcx/error.hpp"
#include "vcx/image.hpp"

namespace vcx {

ImageRaster::ImageRaster(int width, int height, std::vector<std::uint8_t> samples, std::string id)
    : width_(width), height_(height), samples_(std::move(samples)), id_(std::move(id)) {
  if (width < 1 || height < 1) throw Error(Errc::InvalidInput, "image dimensions must be positive");
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
    throw Error(Errc::InvalidInput, "sample count does not match width*height*3");
}

ImageRaster ImageRaster::filled(int width, int height, Rgb color, std::string id) {
  std::vector<std::uint8_t> s(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) * 3);
  for (std::size_t i = 0; i < s.size(); i += 3) {
    s[i] = color.r;
    s[i + 1] = color.g;
    s[i + 2] = color.b;
  }
  return ImageRaster(width, height, std::move(s), std::move(id));
}

Plane ImageRaster::channel(int c) const {
  Plane p(height_, width_);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      p(y, x) = samples_[3 * (static_cast<std::size_t>(y) * width_ + x) + c];
  return p;
}

GrayRaster to_gray(const ImageRaster& img) {
  GrayRaster g{Plane(img.height(), img.width())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      Rgb c = img.at(x, y);
      g.intensity(y, x) = std::round(0.299 * c.r + 0.587 * c.g + 0.114 * c.b);
    }
  }
  return g;
}

namespace {

constexpr double kXn = 0.95047, kYn = 1.00000, kZn = 1.08883;

const std::array<double, 256>& linear_lut() {
  static const std::array<double, 256> lut = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      double c = i / 255.0;
      t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return lut;
}

double lab_f(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d ? t * t * t : 3 * d * d * (t - 4.0 / 29.0);
}

std::uint8_t encode_srgb(double lin) {
  lin = std::clamp(lin, 0.0, 1.0);
  double c = lin <= 0.0031308 ? 12.92 * lin : 1.055 * std::pow(lin, 1.0 / 2.4) - 0.055;
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

}  // namespace

Lab rgb_to_lab(Rgb c) noexcept {
  const auto& lut = linear_lut();
  // Neutral colours sit exactly on the achromatic axis.
  if (c.r == c.g && c.g == c.b) return {116.0 * lab_f(lut[c.r]) - 16.0, 0.0, 0.0};
  double r = lut[c.r], g = lut[c.g], b = lut[c.b];
  double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  double fx = lab_f(X / kXn), fy = lab_f(Y / kYn), fz = lab_f(Z / kZn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Rgb lab_to_rgb(const Lab& lab) noexcept {
  double fy = (lab.L + 16.0) / 116.0;
  double fx = fy + lab.a / 500.0;
  double fz = fy - lab.b / 200.0;
  double X = kXn * lab_f_inv(fx), Y = kYn * lab_f_inv(fy), Z = kZn * lab_f_inv(fz);
  double r = 3.2404542 * X - 1.5371385 * Y - 0.4985314 * Z;
  double g = -0.9692660 * X + 1.8760108 * Y + 0.0415560 * Z;
  double b = 0.0556434 * X - 0.2040259 * Y + 1.0572252 * Z;
  return {encode_srgb(r), encode_srgb(g), encode_srgb(b)};
}

LabRaster to_lab(const ImageRaster& img) {
  LabRaster out{Plane(img.height(), img.width()), Plane(img.height(), img.width()),
                Plane(img.height(), img.width())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      Lab v = rgb_to_lab(img.at(x, y));
      out.L(y, x) = v.L;
      out.a(y, x) = v.a;
      out.b(y, x) = v.b;
    }
  }
  return out;
}

}  // namespace vcx
