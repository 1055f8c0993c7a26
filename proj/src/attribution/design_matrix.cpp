#include <algorithm>
#include <cmath>

#include "vcx/attribution.hpp"
#include "vcx/error.hpp"

namespace vcx {

namespace {

// Relative tolerance below which a column counts as constant.
bool is_degenerate(double sd, double mean) { return !(sd > 1e-12 * std::max(1.0, std::fabs(mean))); }

}  // namespace

DesignMatrix DesignMatrix::build(std::vector<std::string> row_ids, std::vector<std::string> columns,
                                 Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string>* warnings) {
  if (X.rows() != y.size() || static_cast<std::size_t>(X.cols()) != columns.size() ||
      static_cast<std::size_t>(X.rows()) != row_ids.size())
    throw Error(Errc::InvalidInput, "design matrix shapes disagree");
  if (!X.allFinite() || !y.allFinite()) throw Error(Errc::InvalidInput, "design matrix contains missing cells");

  const Standardization s = column_stats(X);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (is_degenerate(s.sd(j), s.mean(j))) {
      if (warnings) warnings->push_back("dropped zero-variance column " + columns[j]);
    } else {
      keep.push_back(j);
    }
  }
  DesignMatrix d;
  d.row_ids = std::move(row_ids);
  d.y = std::move(y);
  d.X.resize(X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    d.X.col(static_cast<Eigen::Index>(k)) = X.col(keep[k]);
    d.columns.push_back(columns[keep[k]]);
  }
  return d;
}

DesignMatrix DesignMatrix::without(const std::vector<std::string>& names) const {
  DesignMatrix d;
  d.row_ids = row_ids;
  d.y = y;
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (std::find(names.begin(), names.end(), columns[j]) == names.end()) keep.push_back(static_cast<Eigen::Index>(j));
  d.X.resize(X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    d.X.col(static_cast<Eigen::Index>(k)) = X.col(keep[k]);
    d.columns.push_back(columns[keep[k]]);
  }
  return d;
}

DesignMatrix DesignMatrix::rows_subset(std::span<const Eigen::Index> rows) const {
  DesignMatrix d;
  d.columns = columns;
  d.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    d.y(static_cast<Eigen::Index>(i)) = y(rows[i]);
    d.row_ids.push_back(row_ids[static_cast<std::size_t>(rows[i])]);
  }
  return d;
}

CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& X, std::vector<std::string> columns) {
  if (X.rows() < 3) throw Error(Errc::InvalidInput, "correlation matrix needs at least 3 rows");
  if (static_cast<std::size_t>(X.cols()) != columns.size())
    throw Error(Errc::InvalidInput, "column names do not match matrix width");
  const Standardization s = column_stats(X);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if (is_degenerate(s.sd(j), s.mean(j)))
      throw Error(Errc::DegenerateColumn, "column " + columns[j] + " has zero variance");

  const Eigen::Index p = X.cols();
  const double n = static_cast<double>(X.rows());
  const Eigen::MatrixXd Z = (X.rowwise() - s.mean.transpose()).array().rowwise() / s.sd.transpose().array();
  CorrelationMatrix out;
  out.columns = std::move(columns);
  out.r = (Z.transpose() * Z) / (n - 1);
  out.p.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    out.r(i, i) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      double& r = out.r(i, j);
      r = std::clamp(r, -1.0, 1.0);
      if (i == j || std::fabs(r) >= 1.0) {
        out.p(i, j) = 0.0;
        continue;
      }
      const double df = n - 2;
      const double t = r * std::sqrt(df / (1.0 - r * r));
      out.p(i, j) = student_t_p_two_sided(t, df);
    }
  }
  return out;
}

}  // namespace vcx
