#include <algorithm>

#include "vcx/attribution.hpp"
#include "vcx/error.hpp"

namespace vcx {

AnalysisResult subgroup_analysis(const Dataset& data, const std::string& tag, const AnalysisConfig& cfg) {
  AnalysisResult res;
  res.tag = tag;
  std::vector<std::string> columns;
  for (const auto& c : data.metric_columns)
    if (std::find(cfg.exclude.begin(), cfg.exclude.end(), c) == cfg.exclude.end()) columns.push_back(c);

  const auto rows = data.rows_with_tag(tag);
  const auto min_rows = columns.size() + 5;
  const std::string label = tag.empty() ? std::string("all images") : "subgroup '" + tag + "'";
  if (rows.size() < min_rows)
    throw Error(Errc::SubgroupTooSmall, label + " has " + std::to_string(rows.size()) + " rows, needs " +
                                            std::to_string(min_rows));
  DesignMatrix X = data.design(rows, columns, &res.warnings);
  if (static_cast<std::size_t>(X.rows()) < static_cast<std::size_t>(X.cols()) + 5)
    throw Error(Errc::SubgroupTooSmall, label + " has " + std::to_string(X.rows()) + " complete rows, needs " +
                                            std::to_string(X.cols() + 5));
  res.rows = static_cast<std::size_t>(X.rows());
  res.model = fit_pls(X, cfg.components);
  res.bootstrap = bootstrap_coefficients(X, cfg.components, cfg.bootstrap);
  res.effects = effect_sizes(X, cfg.components);
  res.r2_by_components = r2_curve(X, 10);
  return res;
}

}  // namespace vcx
