#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "vcx/error.hpp"
#include "vcx/metrics.hpp"

namespace vcx {

MetricVector compute_all(const ImageRaster& img, const TextBoxSet* boxes, const ColorDictionary* dict,
                         const MetricOptions& opts) {
  MetricVector out;
  out.image_id = img.id();
  out.width = img.width();
  out.height = img.height();
  out.tir_mode = opts.tir_mode;

  auto run = [&](Metric m, const std::function<double()>& fn) {
    if (!opts.wants(m)) return;
    try {
      out[m] = fn();
    } catch (const Error& e) {
      throw MetricError(std::string(kMetricKeys[static_cast<std::size_t>(m)]), e);
    }
  };

  run(Metric::IE, [&] { return metric_ie(img); });
  run(Metric::KC, [&] { return metric_kc(img, opts.kc_level); });
  run(Metric::SE, [&] { return metric_se(img); });
  run(Metric::IG, [&] { return metric_ig(img); });
  run(Metric::FC, [&] { return metric_fc(img); });
  run(Metric::H, [&] { return metric_h(img, opts.invert_h); });
  run(Metric::CF, [&] { return metric_cf(img); });
  run(Metric::ERGB, [&] { return metric_ergb(img); });
  run(Metric::ED, [&] { return metric_ed(img); });
  run(Metric::FP, [&] { return metric_fp(img); });
  run(Metric::TiR, [&] {
    if (!boxes) {
      out.tir_missing = true;
      return 0.0;
    }
    return metric_tir(img, *boxes, opts.tir_mode);
  });
  run(Metric::MeC, [&] {
    if (!dict) throw Error(Errc::EmptyDictionary, "no colour dictionary supplied");
    return static_cast<double>(metric_mec(img, *dict, opts.mec).merged_count);
  });
  return out;
}

std::vector<std::array<double, kMetricCount>> normalize_catalog(std::span<const MetricVector> rows) {
  std::vector<std::array<double, kMetricCount>> out(rows.size());
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : rows) {
      const double v = r.values[m];
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = rows[i].values[m];
      if (std::isnan(v))
        out[i][m] = v;
      else
        out[i][m] = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    }
  }
  return out;
}

}  // namespace vcx
