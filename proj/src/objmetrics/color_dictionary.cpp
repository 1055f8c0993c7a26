#include <charconv>
#include <limits>
#include <set>

#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/objects.hpp"

namespace vcx {

ColorDictionary::ColorDictionary(std::vector<ColorEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (auto& e : entries_) {
    if (e.name.empty()) throw Error(Errc::InvalidInput, "colour entry with empty name");
    if (e.group.empty()) throw Error(Errc::InvalidInput, "colour '" + e.name + "' has no group");
    if (!seen.insert(e.name).second) throw Error(Errc::InvalidInput, "duplicate colour name '" + e.name + "'");
    e.lab = rgb_to_lab(e.rgb);
  }
}

namespace {

std::uint8_t parse_channel(const std::string& s, const std::string& name) {
  int v = -1;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0 || v > 255)
    throw Error(Errc::InvalidInput, "colour '" + name + "': channel '" + s + "' is not in 0..255");
  return static_cast<std::uint8_t>(v);
}

}  // namespace

ColorDictionary ColorDictionary::parse_csv(std::string_view text) {
  const csv::Table t = csv::parse(text);
  const auto name = t.column("name"), r = t.column("r"), g = t.column("g"), b = t.column("b"),
             group = t.column("group");
  if (!name || !r || !g || !b || !group)
    throw Error(Errc::InvalidInput, "colour dictionary needs columns name,r,g,b,group");
  std::vector<ColorEntry> entries;
  for (const auto& row : t.rows) {
    ColorEntry e;
    e.name = row[*name];
    e.rgb = {parse_channel(row[*r], e.name), parse_channel(row[*g], e.name), parse_channel(row[*b], e.name)};
    e.group = row[*group];
    entries.push_back(std::move(e));
  }
  return ColorDictionary(std::move(entries));
}

ColorDictionary ColorDictionary::load_csv(const std::filesystem::path& path) {
  return parse_csv(csv::read_text_file(path));
}

std::size_t ColorDictionary::group_count() const {
  std::set<std::string_view> groups;
  for (const auto& e : entries_) groups.insert(e.group);
  return groups.size();
}

std::size_t ColorDictionary::nearest(const Lab& lab) const {
  if (entries_.empty()) throw Error(Errc::EmptyDictionary, "colour dictionary is empty");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double d = delta_e76(lab, entries_[i].lab);
    if (d < best_d || (d == best_d && entries_[i].name < entries_[best].name)) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

}  // namespace vcx
