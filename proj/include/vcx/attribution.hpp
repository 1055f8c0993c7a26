#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vcx/seed.hpp"

namespace vcx {

// --- distributions -----------------------------------------------------------

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// Two-sided p-value of Student's t with `df` degrees of freedom.
double student_t_p_two_sided(double t, double df);
/// Upper-tail p-value of Fisher's F(d1, d2).
double f_p_upper(double f, double d1, double d2);

// --- design matrix -----------------------------------------------------------

struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

/// Column means and sample standard deviations.
Standardization column_stats(const Eigen::MatrixXd& X);

struct DesignMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> columns;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  /// Validates shapes and finiteness; drops zero-variance columns, appending
  /// one message per dropped column to `warnings` when given.
  static DesignMatrix build(std::vector<std::string> row_ids, std::vector<std::string> columns, Eigen::MatrixXd X,
                            Eigen::VectorXd y, std::vector<std::string>* warnings = nullptr);

  Eigen::Index rows() const noexcept { return X.rows(); }
  Eigen::Index cols() const noexcept { return X.cols(); }
  DesignMatrix without(const std::vector<std::string>& names) const;
  DesignMatrix rows_subset(std::span<const Eigen::Index> rows) const;
};

struct CorrelationMatrix {
  std::vector<std::string> columns;
  Eigen::MatrixXd r;
  Eigen::MatrixXd p;
};

/// Pairwise Pearson r with two-sided t-test p-values. Errc::DegenerateColumn
/// for a zero-variance column.
CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& X, std::vector<std::string> columns);

// --- PLS ------------------------------------------------------------------------

struct PlsModel {
  int components = 0;
  std::vector<std::string> columns;
  Standardization x_scale;
  double y_mean = 0;
  double y_sd = 0;
  Eigen::MatrixXd weights;   ///< p x A
  Eigen::MatrixXd loadings;  ///< p x A
  Eigen::MatrixXd scores;    ///< n x A
  Eigen::VectorXd y_loadings;
  /// Regression on standardized X predicting centred y.
  Eigen::VectorXd raw_coefficients;
  /// raw_coefficients / sd(y): change in y, in y standard deviations, per
  /// standard deviation of each metric.
  Eigen::VectorXd coefficients;
  double r2 = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// Single-response NIPALS on standardized X and centred y.
/// Errc::RankDeficient when fewer than A components are extractable.
PlsModel fit_pls(const DesignMatrix& data, int components = 5);
/// Core fit on an already standardized matrix and centred response.
PlsModel fit_pls_standardized(const Eigen::MatrixXd& Z, const Eigen::VectorXd& yc, int components);

/// Training R^2 for A = 1..max_components (stops early at rank).
std::vector<double> r2_curve(const DesignMatrix& data, int max_components = 10);

// --- bootstrap ----------------------------------------------------------------

struct BootstrapOptions {
  int resamples = 1000;
  std::uint64_t seed = 7;
  /// 0 selects the hardware concurrency.
  int threads = 0;
  double alpha = 0.05;
  double max_skip_fraction = 0.05;
};

struct BootstrapReport {
  std::vector<std::string> columns;
  Eigen::VectorXd estimate;
  /// valid resamples x columns.
  Eigen::MatrixXd samples;
  Eigen::VectorXd std_error;
  Eigen::VectorXd p_value;
  std::vector<bool> significant;
  int resamples = 0;
  int skipped = 0;
};

/// Row resampling with replacement; each resample is re-standardized and
/// refit. Resample b draws from splitmix64(seed + b), so results do not
/// depend on the thread count.
BootstrapReport bootstrap_coefficients(const DesignMatrix& data, int components, const BootstrapOptions& opts = {});

// --- effect sizes ---------------------------------------------------------------

struct EffectSizeReport {
  std::vector<std::string> columns;
  double r2_full = 0;
  std::vector<double> r2_drop;
  /// (R2_full - R2_drop) / (1 - R2_full); +inf when R2_full = 1.
  std::vector<double> f2;
};

EffectSizeReport effect_sizes(const DesignMatrix& data, int components = 5);

// --- trend ------------------------------------------------------------------------

struct TrendBin {
  double lo = 0, hi = 0;
  std::size_t n = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
};

struct TrendReport {
  std::vector<TrendBin> bins;
  double f = 0;
  double p = 1;
  int df_between = 0;
  int df_within = 0;
  /// Index into `bins` of the non-empty bin with the lowest mean.
  std::size_t min_bin = 0;
  bool monotone_increasing = false;
};

inline constexpr int kTirTrendBins = 7;
inline constexpr int kMecTrendBins = 4;

/// Equal-width bins over [min x, max x], per-bin mean with a normal 95% CI,
/// one-way ANOVA across non-empty bins. Errc::InsufficientBins below two.
TrendReport binned_trend(std::span<const double> x, std::span<const double> y, int bins);

// --- datasets and subgroups ------------------------------------------------------

struct Dataset {
  std::vector<std::string> ids;
  std::vector<std::set<std::string>> tags;
  /// Metric names in file order (canonical "O.XX" spelling).
  std::vector<std::string> metric_columns;
  /// rows x metric_columns; NaN marks a missing cell.
  Eigen::MatrixXd metrics;
  /// Perceived complexity; NaN when absent.
  Eigen::VectorXd score;

  std::size_t size() const noexcept { return ids.size(); }
  /// Rows carrying `tag`; every row when `tag` is empty.
  std::vector<Eigen::Index> rows_with_tag(const std::string& tag) const;
  /// Design matrix over the given rows and metric columns; rows with a
  /// missing cell are skipped and reported through `warnings`.
  DesignMatrix design(std::span<const Eigen::Index> rows, const std::vector<std::string>& columns,
                      std::vector<std::string>* warnings = nullptr) const;
};

/// One CSV holding id, score, optional tags and any O.* metric columns.
/// Accepted spellings: id = image_id|image name|image_name|id|name;
/// score = vc_score|vc|perceived vc|score|normalized_score|mu; tags = tags|tag
/// (separated by ';' or '|'). A column "tag:<name>" holding 1/yes/true adds
/// <name> to that row's tags.
Dataset parse_dataset(std::string_view csv_text);
Dataset load_dataset(const std::filesystem::path& path);

/// Joins a metrics table with a score table on image id. Errc::InvalidInput
/// listing the metric rows that have no score.
Dataset join_metrics_scores(const Dataset& metrics, const Dataset& scores);

struct AnalysisConfig {
  int components = 5;
  std::vector<std::string> exclude;
  BootstrapOptions bootstrap;
};

struct AnalysisResult {
  std::string tag;
  std::size_t rows = 0;
  PlsModel model;
  BootstrapReport bootstrap;
  EffectSizeReport effects;
  std::vector<double> r2_by_components;
  std::vector<std::string> warnings;
};

/// Full pipeline on one tag-filtered subset (empty tag = all rows).
/// Errc::SubgroupTooSmall when rows < columns + 5.
AnalysisResult subgroup_analysis(const Dataset& data, const std::string& tag, const AnalysisConfig& cfg);

}  // namespace vcx
