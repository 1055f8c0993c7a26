#include <cmath>

#include "vcx/attribution.hpp"
#include "vcx/error.hpp"

namespace vcx {

namespace {

constexpr double kRankTolerance = 1e-10;

}  // namespace

PlsModel fit_pls_standardized(const Eigen::MatrixXd& Z, const Eigen::VectorXd& yc, int components) {
  const Eigen::Index n = Z.rows(), p = Z.cols();
  if (components < 1) throw Error(Errc::InvalidInput, "component count must be >= 1");
  if (components > p || components > n - 1)
    throw Error(Errc::RankDeficient, "cannot extract " + std::to_string(components) + " components from " +
                                         std::to_string(n) + "x" + std::to_string(p) + " data");
  Eigen::MatrixXd X = Z;
  Eigen::VectorXd y = yc;
  PlsModel m;
  m.components = components;
  m.weights.resize(p, components);
  m.loadings.resize(p, components);
  m.scores.resize(n, components);
  m.y_loadings.resize(components);

  const double scale = (Z.transpose() * yc).norm();
  for (int a = 0; a < components; ++a) {
    Eigen::VectorXd w = X.transpose() * y;
    const double norm = w.norm();
    if (!(norm > kRankTolerance * scale) || !(scale > 0))
      throw Error(Errc::RankDeficient, "only " + std::to_string(a) + " components are extractable");
    w /= norm;
    const Eigen::VectorXd t = X * w;
    const double tt = t.squaredNorm();
    if (!(tt > 0)) throw Error(Errc::RankDeficient, "component " + std::to_string(a + 1) + " has zero scores");
    const Eigen::VectorXd load = X.transpose() * t / tt;
    const double q = y.dot(t) / tt;
    X -= t * load.transpose();
    y -= q * t;
    m.weights.col(a) = w;
    m.loadings.col(a) = load;
    m.scores.col(a) = t;
    m.y_loadings(a) = q;
  }
  const Eigen::MatrixXd ptw = m.loadings.transpose() * m.weights;
  m.raw_coefficients = m.weights * ptw.partialPivLu().solve(m.y_loadings);
  const double sst = yc.squaredNorm();
  const double sse = (yc - Z * m.raw_coefficients).squaredNorm();
  m.r2 = sst > 0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 0.0;
  m.coefficients = m.raw_coefficients;
  return m;
}

PlsModel fit_pls(const DesignMatrix& data, int components) {
  if (data.cols() == 0) throw Error(Errc::RankDeficient, "design matrix has no columns");
  const Standardization xs = column_stats(data.X);
  for (Eigen::Index j = 0; j < data.cols(); ++j)
    if (!(xs.sd(j) > 0)) throw Error(Errc::DegenerateColumn, "column " + data.columns[j] + " has zero variance");
  const double y_mean = data.y.mean();
  const Eigen::VectorXd yc = data.y.array() - y_mean;
  const double n = static_cast<double>(data.rows());
  const double y_sd = n > 1 ? std::sqrt(yc.squaredNorm() / (n - 1)) : 0.0;
  if (!(y_sd > 0)) throw Error(Errc::DegenerateColumn, "response has zero variance");

  const Eigen::MatrixXd Z = (data.X.rowwise() - xs.mean.transpose()).array().rowwise() / xs.sd.transpose().array();
  PlsModel m = fit_pls_standardized(Z, yc, components);
  m.columns = data.columns;
  m.x_scale = xs;
  m.y_mean = y_mean;
  m.y_sd = y_sd;
  m.coefficients = m.raw_coefficients / y_sd;
  return m;
}

Eigen::VectorXd PlsModel::predict(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd Z = (X.rowwise() - x_scale.mean.transpose()).array().rowwise() / x_scale.sd.transpose().array();
  return (Z * raw_coefficients).array() + y_mean;
}

std::vector<double> r2_curve(const DesignMatrix& data, int max_components) {
  std::vector<double> out;
  for (int a = 1; a <= max_components; ++a) {
    try {
      out.push_back(fit_pls(data, a).r2);
    } catch (const Error& e) {
      if (e.code() != Errc::RankDeficient) throw;
      break;
    }
  }
  return out;
}

}  // namespace vcx
