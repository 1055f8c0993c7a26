#include "vcx/metric_names.hpp"

#include <cctype>
#include <string>

namespace vcx {

std::string_view column_name(Metric m) noexcept { return kMetricColumns[static_cast<std::size_t>(m)]; }

std::optional<Metric> parse_metric(std::string_view name) {
  std::string key;
  for (char c : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key.rfind("o.", 0) == 0) key.erase(0, 2);
  for (std::size_t i = 0; i < kMetricCount; ++i)
    if (kMetricKeys[i] == key) return static_cast<Metric>(i);
  return std::nullopt;
}

}  // namespace vcx
