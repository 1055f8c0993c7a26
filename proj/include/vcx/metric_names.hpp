#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace vcx {

enum class Metric : std::size_t { IE, KC, SE, IG, FC, H, CF, ERGB, ED, FP, TiR, MeC };

inline constexpr std::size_t kMetricCount = 12;
inline constexpr std::array<std::string_view, kMetricCount> kMetricColumns = {
    "O.IE", "O.KC", "O.SE", "O.IG", "O.FC", "O.H", "O.CF", "O.ERGB", "O.ED", "O.FP", "O.TiR", "O.MeC"};
/// Short lower-case names used in error tags ("se", "fc", ...).
inline constexpr std::array<std::string_view, kMetricCount> kMetricKeys = {
    "ie", "kc", "se", "ig", "fc", "h", "cf", "ergb", "ed", "fp", "tir", "mec"};

std::string_view column_name(Metric m) noexcept;
/// Accepts "O.ED", "ED" or "ed".
std::optional<Metric> parse_metric(std::string_view name);

}  // namespace vcx
