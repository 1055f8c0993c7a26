#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

#include "vcx/attribution.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/metric_names.hpp"

namespace vcx {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& column) {
  std::string s = trim(raw);
  const std::string l = lower(s);
  if (s.empty() || l == "na" || l == "nan" || l == "n/a" || l == "null") return std::numeric_limits<double>::quiet_NaN();
  double scale = 1.0;
  if (s.back() == '%') {
    s.pop_back();
    scale = 0.01;
  }
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(Errc::InvalidInput, "row " + std::to_string(row + 2) + ", column " + column + ": '" + raw +
                                        "' is not a number");
  return v * scale;
}

bool truthy(const std::string& raw) {
  const std::string l = lower(trim(raw));
  return l == "1" || l == "true" || l == "yes" || l == "y" || l == "x";
}

}  // namespace

std::vector<Eigen::Index> Dataset::rows_with_tag(const std::string& tag) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (tag.empty() || tags[i].count(tag)) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

DesignMatrix Dataset::design(std::span<const Eigen::Index> rows, const std::vector<std::string>& columns,
                             std::vector<std::string>* warnings) const {
  std::vector<Eigen::Index> col_idx;
  for (const auto& c : columns) {
    auto it = std::find(metric_columns.begin(), metric_columns.end(), c);
    if (it == metric_columns.end()) throw Error(Errc::InvalidInput, "dataset has no column " + c);
    col_idx.push_back(static_cast<Eigen::Index>(it - metric_columns.begin()));
  }
  std::vector<Eigen::Index> usable;
  std::size_t skipped = 0;
  for (auto r : rows) {
    bool ok = std::isfinite(score(r));
    for (auto c : col_idx) ok = ok && std::isfinite(metrics(r, c));
    if (ok)
      usable.push_back(r);
    else
      ++skipped;
  }
  if (skipped && warnings) warnings->push_back("skipped " + std::to_string(skipped) + " rows with missing cells");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(usable.size()), static_cast<Eigen::Index>(col_idx.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(usable.size()));
  std::vector<std::string> row_ids;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    for (std::size_t j = 0; j < col_idx.size(); ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = metrics(usable[i], col_idx[j]);
    y(static_cast<Eigen::Index>(i)) = score(usable[i]);
    row_ids.push_back(ids[static_cast<std::size_t>(usable[i])]);
  }
  return DesignMatrix::build(std::move(row_ids), columns, std::move(X), std::move(y), warnings);
}

Dataset parse_dataset(std::string_view csv_text) {
  const csv::Table t = csv::parse(csv_text);
  const auto id_col = t.column_any({"image_id", "image name", "image_name", "id", "name"});
  if (!id_col) throw Error(Errc::InvalidInput, "dataset needs an image_id column");
  const auto score_col = t.column_any({"vc_score", "vc", "perceived vc", "score", "normalized_score", "mu"});
  const auto tag_col = t.column_any({"tags", "tag"});

  Dataset d;
  std::vector<std::size_t> metric_src;
  std::vector<std::pair<std::size_t, std::string>> flag_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string h = trim(t.header[c]);
    const std::string hl = lower(h);
    if (hl.rfind("o.", 0) == 0) {
      if (auto m = parse_metric(h)) {
        const std::string canon(column_name(*m));
        if (std::find(d.metric_columns.begin(), d.metric_columns.end(), canon) != d.metric_columns.end())
          throw Error(Errc::InvalidInput, "duplicate metric column " + canon);
        d.metric_columns.push_back(canon);
        metric_src.push_back(c);
      }
    } else if (hl.rfind("tag:", 0) == 0) {
      flag_cols.emplace_back(c, trim(h.substr(4)));
    }
  }

  const auto n = static_cast<Eigen::Index>(t.rows.size());
  d.metrics.resize(n, static_cast<Eigen::Index>(d.metric_columns.size()));
  d.score = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string id = trim(row[*id_col]);
    if (id.empty()) throw Error(Errc::InvalidInput, "row " + std::to_string(r + 2) + " has an empty id");
    if (!seen.insert(id).second) throw Error(Errc::InvalidInput, "duplicate image id " + id);
    d.ids.push_back(id);
    std::set<std::string> tags;
    if (tag_col) {
      std::string cell = row[*tag_col];
      std::replace(cell.begin(), cell.end(), '|', ';');
      std::size_t start = 0;
      while (start <= cell.size()) {
        const auto end = std::min(cell.find(';', start), cell.size());
        const std::string tag = trim(std::string_view(cell).substr(start, end - start));
        if (!tag.empty()) tags.insert(tag);
        start = end + 1;
      }
    }
    for (const auto& [c, name] : flag_cols)
      if (truthy(row[c])) tags.insert(name);
    d.tags.push_back(std::move(tags));
    for (std::size_t j = 0; j < metric_src.size(); ++j)
      d.metrics(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          parse_cell(row[metric_src[j]], r, d.metric_columns[j]);
    if (score_col) d.score(static_cast<Eigen::Index>(r)) = parse_cell(row[*score_col], r, t.header[*score_col]);
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(csv::read_text_file(path)); }

Dataset join_metrics_scores(const Dataset& metrics, const Dataset& scores) {
  std::map<std::string, std::size_t> score_index;
  for (std::size_t i = 0; i < scores.ids.size(); ++i) score_index[scores.ids[i]] = i;
  std::vector<std::string> missing;
  for (const auto& id : metrics.ids)
    if (!score_index.count(id)) missing.push_back(id);
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20) list += ", ...";
    throw Error(Errc::InvalidInput, std::to_string(missing.size()) + " image ids have no score: " + list);
  }
  Dataset out = metrics;
  for (std::size_t i = 0; i < out.ids.size(); ++i) {
    const std::size_t s = score_index.at(out.ids[i]);
    out.score(static_cast<Eigen::Index>(i)) = scores.score(static_cast<Eigen::Index>(s));
    out.tags[i].insert(scores.tags[s].begin(), scores.tags[s].end());
  }
  return out;
}

}  // namespace vcx
