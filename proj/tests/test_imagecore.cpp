#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "vcx/codec.hpp"
#include "vcx/error.hpp"
#include "vcx/histogram.hpp"
#include "vcx/image.hpp"

using namespace vcx;
using vcx::test::noise_image;

TEST_CASE("decode: PNG round trip and solid black") {
  const auto black = ImageRaster::filled(2, 2, {0, 0, 0});
  const auto bytes = encode_png(black);
  const auto back = decode_image(bytes);
  CHECK(back.width() == 2);
  CHECK(back.height() == 2);
  for (auto s : back.samples()) CHECK(s == 0);

  const auto noisy = noise_image(17, 9, 3);
  const auto again = decode_image(encode_png(noisy));
  CHECK(std::equal(noisy.samples().begin(), noisy.samples().end(), again.samples().begin()));
}

TEST_CASE("decode: 1x1 white JPEG") {
  const auto bytes = encode_jpeg(ImageRaster::filled(1, 1, {255, 255, 255}), 100);
  const auto img = decode_image(bytes);
  REQUIRE(img.width() == 1);
  CHECK(img.at(0, 0) == Rgb{255, 255, 255});
}

TEST_CASE("decode: truncated and unknown streams") {
  auto bytes = encode_png(noise_image(32, 32, 1));
  bytes.resize(bytes.size() / 2);
  try {
    decode_image(bytes);
    FAIL("truncated PNG decoded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CorruptImage);
  }
  auto jpeg = encode_jpeg(noise_image(32, 32, 1));
  jpeg.resize(40);
  CHECK_THROWS_AS(decode_image(jpeg), Error);
  const std::vector<std::uint8_t> junk{'G', 'I', 'F', '8', '9', 'a', 0, 0};
  try {
    decode_image(junk);
    FAIL("GIF accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnsupportedFormat);
  }
}

TEST_CASE("to_gray: BT.601 weights") {
  auto g = [](Rgb c) { return to_gray(ImageRaster::filled(1, 1, c)).intensity(0, 0); };
  CHECK(g({255, 255, 255}) == 255);
  CHECK(g({0, 0, 0}) == 0);
  CHECK(g({255, 0, 0}) == 76);
  CHECK(g({0, 255, 0}) == 150);
  CHECK(g({0, 0, 255}) == 29);
}

TEST_CASE("to_lab: reference values") {
  // Reference: skimage.color.rgb2lab (tests/oracles/oracles.json).
  const Lab red = rgb_to_lab({255, 0, 0});
  CHECK(red.L == doctest::Approx(53.2405879437449).epsilon(1e-4));
  CHECK(red.a == doctest::Approx(80.0923082256922).epsilon(1e-4));
  CHECK(red.b == doctest::Approx(67.2027510444287).epsilon(1e-4));
  const Lab white = rgb_to_lab({255, 255, 255});
  CHECK(white.L == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(std::abs(white.a) < 1e-2);
  CHECK(std::abs(white.b) < 1e-2);
  const Lab black = rgb_to_lab({0, 0, 0});
  CHECK(black.L == 0.0);
  CHECK(black.a == 0.0);
  CHECK(black.b == 0.0);
}

TEST_CASE("to_lab: inverse round trip within one code value") {
  const auto img = noise_image(16, 16, 8);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const Rgb c = img.pixel(i), back = lab_to_rgb(rgb_to_lab(c));
    CHECK(std::abs(int(c.r) - back.r) <= 1);
    CHECK(std::abs(int(c.g) - back.g) <= 1);
    CHECK(std::abs(int(c.b) - back.b) <= 1);
  }
}

TEST_CASE("colour views are pixel-local") {
  auto img = noise_image(12, 10, 4);
  const auto g0 = to_gray(img);
  const auto l0 = to_lab(img);
  img.set(5, 5, {1, 2, 3});
  const auto g1 = to_gray(img);
  const auto l1 = to_lab(img);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x) {
      if (x == 5 && y == 5) continue;
      CHECK(g0.intensity(y, x) == g1.intensity(y, x));
      CHECK(l0.L(y, x) == l1.L(y, x));
      CHECK(l0.b(y, x) == l1.b(y, x));
    }
}

TEST_CASE("gaussian_pyramid: sizes, constants and level limit") {
  const auto levels = gaussian_pyramid(to_gray(noise_image(64, 64, 2)), 3);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0].width() == 64);
  CHECK(levels[1].width() == 32);
  CHECK(levels[2].width() == 16);

  const auto odd = gaussian_pyramid(Plane::Constant(37, 45, 0.0), 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(odd[k].rows() == (37 + (1 << k) - 1) >> k);
    CHECK(odd[k].cols() == (45 + (1 << k) - 1) >> k);
  }

  const auto flat = gaussian_pyramid(Plane::Constant(32, 32, 77.0), 4);
  for (const auto& p : flat) CHECK((p - 77.0).abs().maxCoeff() < 1e-9);

  try {
    gaussian_pyramid(Plane::Constant(16, 16, 0.0), 7);
    FAIL("accepted too many levels");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooManyLevels);
  }
}

TEST_CASE("histograms sum to one") {
  const auto img = noise_image(33, 21, 6);
  const auto h = Histogram::of_gray(to_gray(img));
  double s = 0;
  for (double p : h.probabilities()) s += p;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  const Plane L = to_lab(img).L;
  const auto e = Histogram::equal_width(std::span<const double>(L.data(), L.size()), 16);
  s = 0;
  for (double p : e.probabilities()) s += p;
  CHECK(std::abs(s - 1.0) < 1e-9);
  CHECK(e.bins.size() == 16);
}
