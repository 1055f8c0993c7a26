#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcx/image.hpp"

namespace vcx {

// ---------------------------------------------------------------------------
// Text annotations

enum class TextLabel { Annotation, Title, Legend, Axis, Other };

std::string_view to_string(TextLabel label) noexcept;
TextLabel parse_text_label(std::string_view s);

struct TextBox {
  int x = 0, y = 0, w = 1, h = 1;
  TextLabel label = TextLabel::Other;
};

struct TextBoxSet {
  std::string image_id;
  std::vector<TextBox> boxes;
};

/// One JSON object per line: {"image_id": ..., "boxes": [{"x","y","w","h","label"}]}.
std::map<std::string, TextBoxSet> parse_text_boxes(std::string_view jsonl);
std::map<std::string, TextBoxSet> load_text_boxes(const std::filesystem::path& path);

enum class TirMode { Ink, BoxArea };

std::string_view to_string(TirMode mode) noexcept;
TirMode parse_tir_mode(std::string_view s);

/// Per-box Otsu threshold on luminance; the darker class is ink. Returns a
/// 0/1 mask the size of the image with every box's ink pixels set.
PlaneT<std::uint8_t> text_ink_mask(const ImageRaster& img, const TextBoxSet& boxes);

/// Text-ink ratio: text pixels (ink, or box union) over all pixels.
/// Overlapping boxes are counted once. Throws Errc::BoxOutOfBounds.
double metric_tir(const ImageRaster& img, const TextBoxSet& boxes, TirMode mode = TirMode::Ink);

// ---------------------------------------------------------------------------
// Colour naming

struct ColorEntry {
  std::string name;
  Rgb rgb;
  std::string group;
  Lab lab;
};

class ColorDictionary {
 public:
  ColorDictionary() = default;
  /// Validates: unique names, non-empty groups. Empty input is allowed here
  /// and rejected by the naming operations with Errc::EmptyDictionary.
  explicit ColorDictionary(std::vector<ColorEntry> entries);

  /// CSV with header name,r,g,b,group.
  static ColorDictionary parse_csv(std::string_view text);
  static ColorDictionary load_csv(const std::filesystem::path& path);

  const std::vector<ColorEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t group_count() const;

  /// Index of the entry with the smallest CIE76 distance; ties go to the
  /// lexicographically smaller name.
  std::size_t nearest(const Lab& lab) const;
  const ColorEntry& entry(std::size_t i) const { return entries_[i]; }

 private:
  std::vector<ColorEntry> entries_;
};

/// Pixel count per dictionary name (names with zero pixels are omitted).
std::map<std::string, std::uint64_t> name_colors(const ImageRaster& img, const ColorDictionary& dict);

struct MecCluster {
  std::string representative;
  Rgb color;
  double share = 0;
  std::vector<std::string> members;
};

struct MecReport {
  /// Distinct dictionary names present in the counted region.
  std::size_t named_count = 0;
  /// Names that survive the pixel-share noise floor.
  std::size_t namable_count = 0;
  /// The meaningful-colour count.
  std::size_t merged_count = 0;
  std::vector<MecCluster> clusters;
};

struct MecOptions {
  double delta_e_max = 14.0;
  double min_share = 0.005;
  /// Restricts counting to a rectangle, e.g. an annotated legend box.
  std::optional<TextBox> region;
};

MecReport metric_mec(const ImageRaster& img, const ColorDictionary& dict, const MecOptions& opts = {});

}  // namespace vcx
