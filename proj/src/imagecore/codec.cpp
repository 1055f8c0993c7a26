#include "vcx/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "vcx/csv.hpp"
#include "vcx/error.hpp"

namespace vcx {

namespace {

constexpr std::uint8_t kPngSig[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
constexpr std::uint8_t kJpegSig[] = {0xFF, 0xD8, 0xFF};

bool has_prefix(std::span<const std::uint8_t> bytes, std::span<const std::uint8_t> sig) {
  std::size_t n = std::min(bytes.size(), sig.size());
  return std::memcmp(bytes.data(), sig.data(), n) == 0;
}

std::uint8_t over_white(std::uint8_t c, std::uint8_t alpha) {
  // c*a + 255*(1-a), all in 8-bit units, rounded.
  unsigned v = unsigned{c} * alpha + 255u * (255u - alpha);
  return static_cast<std::uint8_t>((v + 127u) / 255u);
}

ImageRaster decode_png(std::span<const std::uint8_t> bytes, std::string id) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::CorruptImage, "png: " + msg);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::CorruptImage, "png: " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  png_image_free(&image);

  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0, n = static_cast<std::size_t>(w) * h; i < n; ++i) {
    const std::uint8_t a = rgba[4 * i + 3];
    for (int c = 0; c < 3; ++c) rgb[3 * i + c] = over_white(rgba[4 * i + c], a);
  }
  return ImageRaster(w, h, std::move(rgb), std::move(id));
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  bool warned = false;
  char message[JMSG_LENGTH_MAX] = {};
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_emit_message(j_common_ptr cinfo, int level) {
  // Negative levels are corrupt-data warnings (e.g. premature end of file).
  if (level < 0) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    if (!err->warned) (*cinfo->err->format_message)(cinfo, err->message);
    err->warned = true;
  }
}

ImageRaster decode_jpeg(std::span<const std::uint8_t> bytes, std::string id) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_emit_message;

  // Everything that must survive a longjmp lives outside this frame's RAII.
  std::vector<std::uint8_t> rgb;
  int w = 0, h = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(Errc::CorruptImage, std::string("jpeg: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  w = static_cast<int>(cinfo.output_width);
  h = static_cast<int>(cinfo.output_height);
  rgb.resize(static_cast<std::size_t>(w) * h * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  if (err.warned) throw Error(Errc::CorruptImage, std::string("jpeg: ") + err.message);
  return ImageRaster(w, h, std::move(rgb), std::move(id));
}

}  // namespace

ImageRaster decode_image(std::span<const std::uint8_t> bytes, std::string id) {
  if (bytes.empty()) throw Error(Errc::CorruptImage, "empty image stream");
  if (has_prefix(bytes, kPngSig)) return decode_png(bytes, std::move(id));
  if (has_prefix(bytes, kJpegSig)) return decode_jpeg(bytes, std::move(id));
  throw Error(Errc::UnsupportedFormat, "unrecognised image signature");
}

ImageRaster load_image(const std::filesystem::path& path, std::string id) {
  auto bytes = csv::read_binary_file(path);
  if (id.empty()) id = path.stem().string();
  return decode_image(std::span<const std::uint8_t>(bytes.data(), bytes.size()), std::move(id));
}

std::vector<std::uint8_t> encode_png(const ImageRaster& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.samples().data(), 0, nullptr))
    throw Error(Errc::Io, std::string("png encode: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.samples().data(), 0, nullptr))
    throw Error(Errc::Io, std::string("png encode: ") + image.message);
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const ImageRaster& img, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  unsigned char* mem = nullptr;
  unsigned long mem_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(mem);
    throw Error(Errc::Io, std::string("jpeg encode: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &mem, &mem_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const auto samples = img.samples();
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPLE*>(samples.data() +
                                     static_cast<std::size_t>(cinfo.next_scanline) * img.width() * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(mem, mem + mem_size);
  jpeg_destroy_compress(&cinfo);
  std::free(mem);
  return out;
}

void save_png(const ImageRaster& img, const std::filesystem::path& path) {
  auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace vcx
