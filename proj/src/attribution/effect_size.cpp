#include <algorithm>
#include <limits>

#include "vcx/attribution.hpp"
#include "vcx/error.hpp"

namespace vcx {

EffectSizeReport effect_sizes(const DesignMatrix& data, int components) {
  EffectSizeReport rep;
  rep.columns = data.columns;
  rep.r2_full = fit_pls(data, components).r2;
  for (const auto& name : data.columns) {
    const DesignMatrix reduced = data.without({name});
    double r2 = 0.0;
    if (reduced.cols() > 0) {
      // Cap A at the rank of what is left, then back off further when the
      // response has no covariance with the remaining directions.
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(reduced.X.rowwise() - reduced.X.colwise().mean());
      int a = std::min<int>(components, static_cast<int>(qr.rank()));
      for (; a >= 1; --a) {
        try {
          r2 = fit_pls(reduced, a).r2;
          break;
        } catch (const Error& e) {
          if (e.code() != Errc::RankDeficient) throw;
        }
      }
    }
    rep.r2_drop.push_back(r2);
    const double denom = 1.0 - rep.r2_full;
    rep.f2.push_back(denom > 0 ? (rep.r2_full - r2) / denom : std::numeric_limits<double>::infinity());
  }
  return rep;
}

}  // namespace vcx
