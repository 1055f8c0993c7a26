#include <vector>

#include <zlib.h>

#include "vcx/error.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

std::string_view kc_compressor_name() { return "zlib-deflate"; }

double metric_kc(const ImageRaster& img, int level) {
  const auto raw = img.samples();
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<Bytef> out(bound);
  int rc = compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), level);
  if (rc != Z_OK) throw Error(Errc::InvalidInput, "zlib compress2 failed with code " + std::to_string(rc));
  return static_cast<double>(bound);
}

}  // namespace vcx
