#include <array>
#include <sstream>

#include <json.hpp>

#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/objects.hpp"

namespace vcx {

std::string_view to_string(TextLabel label) noexcept {
  switch (label) {
    case TextLabel::Annotation: return "annotation";
    case TextLabel::Title: return "title";
    case TextLabel::Legend: return "legend";
    case TextLabel::Axis: return "axis";
    case TextLabel::Other: return "other";
  }
  return "other";
}

TextLabel parse_text_label(std::string_view s) {
  for (auto l : {TextLabel::Annotation, TextLabel::Title, TextLabel::Legend, TextLabel::Axis, TextLabel::Other})
    if (to_string(l) == s) return l;
  throw Error(Errc::InvalidInput, "unknown text label '" + std::string(s) + "'");
}

std::string_view to_string(TirMode mode) noexcept { return mode == TirMode::Ink ? "ink" : "box-area"; }

TirMode parse_tir_mode(std::string_view s) {
  if (s == "ink") return TirMode::Ink;
  if (s == "box-area" || s == "box_area" || s == "box") return TirMode::BoxArea;
  throw Error(Errc::InvalidInput, "unknown TiR mode '" + std::string(s) + "'");
}

std::map<std::string, TextBoxSet> parse_text_boxes(std::string_view jsonl) {
  std::map<std::string, TextBoxSet> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TextBoxSet set;
      set.image_id = j.at("image_id").get<std::string>();
      for (const auto& b : j.value("boxes", nlohmann::json::array())) {
        TextBox box;
        box.x = b.at("x").get<int>();
        box.y = b.at("y").get<int>();
        box.w = b.at("w").get<int>();
        box.h = b.at("h").get<int>();
        box.label = parse_text_label(b.value("label", "other"));
        if (box.w < 1 || box.h < 1) throw Error(Errc::InvalidInput, "box width and height must be >= 1");
        set.boxes.push_back(box);
      }
      auto& slot = out[set.image_id];
      slot.image_id = set.image_id;
      slot.boxes.insert(slot.boxes.end(), set.boxes.begin(), set.boxes.end());
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidInput, "text boxes line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "text boxes line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, TextBoxSet> load_text_boxes(const std::filesystem::path& path) {
  return parse_text_boxes(csv::read_text_file(path));
}

namespace {

void check_bounds(const ImageRaster& img, const TextBox& b) {
  if (b.x < 0 || b.y < 0 || b.w < 1 || b.h < 1 || b.x + b.w > img.width() || b.y + b.h > img.height())
    throw Error(Errc::BoxOutOfBounds, "box (" + std::to_string(b.x) + "," + std::to_string(b.y) + "," +
                                          std::to_string(b.w) + "," + std::to_string(b.h) + ") exceeds " +
                                          std::to_string(img.width()) + "x" + std::to_string(img.height()));
}

// Largest threshold t maximising between-class variance, class 0 = values <= t.
// Returns -1 when the histogram has a single occupied level.
int otsu_threshold(const std::array<std::uint64_t, 256>& hist) {
  double total = 0, sum = 0;
  int occupied = 0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    sum += i * double(hist[i]);
    occupied += hist[i] > 0;
  }
  if (occupied < 2) return -1;
  double w0 = 0, sum0 = 0, best = -1;
  int best_t = -1;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[t];
    sum0 += t * double(hist[t]);
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double m0 = sum0 / w0, m1 = (sum - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

PlaneT<std::uint8_t> text_ink_mask(const ImageRaster& img, const TextBoxSet& boxes) {
  PlaneT<std::uint8_t> mask = PlaneT<std::uint8_t>::Zero(img.height(), img.width());
  if (boxes.boxes.empty()) return mask;
  const GrayRaster gray = to_gray(img);
  for (const auto& b : boxes.boxes) {
    check_bounds(img, b);
    std::array<std::uint64_t, 256> hist{};
    for (int y = b.y; y < b.y + b.h; ++y)
      for (int x = b.x; x < b.x + b.w; ++x) ++hist[static_cast<int>(gray.intensity(y, x))];
    const int t = otsu_threshold(hist);
    if (t < 0) continue;
    for (int y = b.y; y < b.y + b.h; ++y)
      for (int x = b.x; x < b.x + b.w; ++x)
        if (gray.intensity(y, x) <= t) mask(y, x) = 1;
  }
  return mask;
}

double metric_tir(const ImageRaster& img, const TextBoxSet& boxes, TirMode mode) {
  PlaneT<std::uint8_t> mask;
  if (mode == TirMode::Ink) {
    mask = text_ink_mask(img, boxes);
  } else {
    mask = PlaneT<std::uint8_t>::Zero(img.height(), img.width());
    for (const auto& b : boxes.boxes) {
      check_bounds(img, b);
      mask.block(b.y, b.x, b.h, b.w).setOnes();
    }
  }
  return mask.cast<double>().sum() / static_cast<double>(img.pixel_count());
}

}  // namespace vcx
