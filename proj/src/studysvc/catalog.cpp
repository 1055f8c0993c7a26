#include <algorithm>

#include "vcx/codec.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/study.hpp"

namespace vcx {

Catalog::Catalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id.empty()) throw Error(Errc::InvalidInput, "catalog entry with empty id");
    if (entries_[i].id == kControlImageId)
      throw Error(Errc::InvalidInput, "catalog id " + std::string(kControlImageId) + " is reserved");
    if (!index_.emplace(entries_[i].id, i).second)
      throw Error(Errc::InvalidInput, "duplicate catalog id " + entries_[i].id);
  }
}

Catalog Catalog::load_csv(const std::filesystem::path& path, bool probe) {
  const csv::Table t = csv::read_file(path);
  const auto id = t.column("id"), file = t.column("path"), tags = t.column("tags");
  if (!id || !file) throw Error(Errc::InvalidInput, path.string() + ": catalog needs id and path columns");
  const auto base = path.parent_path();
  std::vector<CatalogEntry> entries;
  for (const auto& row : t.rows) {
    CatalogEntry e;
    e.id = row[*id];
    e.path = row[*file];
    if (e.path.is_relative()) e.path = base / e.path;
    if (tags) {
      std::string cell = row[*tags];
      std::size_t start = 0;
      while (start <= cell.size()) {
        const auto end = std::min(cell.find(';', start), cell.size());
        std::string tag = cell.substr(start, end - start);
        tag.erase(0, tag.find_first_not_of(' '));
        tag.erase(tag.find_last_not_of(' ') + 1);
        if (!tag.empty()) e.tags.insert(tag);
        start = end + 1;
      }
    }
    if (probe) {
      if (!std::filesystem::exists(e.path)) throw Error(Errc::Io, "catalog image not found: " + e.path.string());
      const ImageRaster img = load_image(e.path, e.id);
      e.width = img.width();
      e.height = img.height();
    }
    entries.push_back(std::move(e));
  }
  return Catalog(std::move(entries));
}

std::vector<std::string> Catalog::ids() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.id);
  return out;
}

const CatalogEntry* Catalog::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

ImageRaster make_control_image(int width, int height) {
  ImageRaster img = ImageRaster::filled(width, height, {255, 255, 255}, std::string(kControlImageId));
  const int y = height / 2;
  for (int x = width / 4; x < 3 * width / 4; ++x) img.set(x, y, {235, 235, 235});
  return img;
}

}  // namespace vcx
