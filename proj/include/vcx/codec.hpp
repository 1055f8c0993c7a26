#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vcx/image.hpp"

namespace vcx {

/// Decodes PNG or JPEG bytes. Alpha is composited over white.
/// Throws Errc::UnsupportedFormat or Errc::CorruptImage.
ImageRaster decode_image(std::span<const std::uint8_t> bytes, std::string id = {});
ImageRaster load_image(const std::filesystem::path& path, std::string id = {});

std::vector<std::uint8_t> encode_png(const ImageRaster& img);
std::vector<std::uint8_t> encode_jpeg(const ImageRaster& img, int quality = 95);
void save_png(const ImageRaster& img, const std::filesystem::path& path);

}  // namespace vcx
