#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vcx/image.hpp"
#include "vcx/seed.hpp"

namespace vcx::test {

inline std::filesystem::path test_data(const std::string& name) { return std::filesystem::path(VCX_TEST_DATA_DIR) / name; }
inline std::filesystem::path shipped_data(const std::string& name) { return std::filesystem::path(VCX_DATA_DIR) / name; }

/// Channel i of the image is splitmix64(seed * FNV_prime + i) >> 56; the
/// Python oracle script generates the same stream.
inline ImageRaster noise_image(int w, int h, std::uint64_t seed) {
  const std::uint64_t base = seed * 1099511628211ULL;
  std::vector<std::uint8_t> s(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(splitmix64(base + i) >> 56);
  return ImageRaster(w, h, std::move(s));
}

/// Random image drawn from a small palette.
inline ImageRaster palette_noise(int w, int h, const std::vector<Rgb>& palette, std::uint64_t seed) {
  ImageRaster img = ImageRaster::filled(w, h, palette.front());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto v = splitmix64(seed + static_cast<std::uint64_t>(y) * w + x);
      img.set(x, y, palette[v % palette.size()]);
    }
  return img;
}

inline ImageRaster horizontal_gradient(int w, int h) {
  ImageRaster img = ImageRaster::filled(w, h, {});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto v = static_cast<std::uint8_t>(x * 255 / std::max(1, w - 1));
      img.set(x, y, {v, v, v});
    }
  return img;
}

inline void fill_rect(ImageRaster& img, int x0, int y0, int x1, int y1, Rgb c) {
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) img.set(x, y, c);
}

inline ImageRaster checkerboard(int w, int h, Rgb a, Rgb b) {
  ImageRaster img = ImageRaster::filled(w, h, a);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((x + y) % 2) img.set(x, y, b);
  return img;
}

/// Seeded Fisher-Yates shuffle of pixel positions.
inline ImageRaster shuffle_pixels(const ImageRaster& img, std::uint64_t seed) {
  std::vector<std::size_t> order(img.pixel_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  ImageRaster out = img;
  for (std::size_t i = 0; i < order.size(); ++i)
    out.set(static_cast<int>(i % img.width()), static_cast<int>(i / img.width()), img.pixel(order[i]));
  return out;
}

inline ImageRaster cyclic_shift(const ImageRaster& img, int dx, int dy) {
  ImageRaster out = img;
  const int w = img.width(), h = img.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set((x + dx) % w, (y + dy) % h, img.at(x, y));
  return out;
}

}  // namespace vcx::test
