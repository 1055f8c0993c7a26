#include <algorithm>
#include <cmath>
#include <limits>

#include "vcx/attribution.hpp"
#include "vcx/error.hpp"

namespace vcx {

TrendReport binned_trend(std::span<const double> x, std::span<const double> y, int bins) {
  if (x.size() != y.size()) throw Error(Errc::InvalidInput, "trend inputs differ in length");
  if (bins < 2) throw Error(Errc::InsufficientBins, "trend analysis needs at least 2 bins");
  if (x.empty()) throw Error(Errc::InsufficientBins, "no observations");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = (hi - lo) / bins;

  TrendReport rep;
  rep.bins.resize(static_cast<std::size_t>(bins));
  std::vector<double> sum(bins, 0.0), sumsq(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    rep.bins[b].lo = lo + b * width;
    rep.bins[b].hi = b + 1 == bins ? hi : lo + (b + 1) * width;
  }
  std::vector<int> member(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    int b = width > 0 ? static_cast<int>((x[i] - lo) / width) : 0;
    b = std::clamp(b, 0, bins - 1);
    member[i] = b;
    ++rep.bins[b].n;
    sum[b] += y[i];
  }
  int nonempty = 0;
  for (int b = 0; b < bins; ++b)
    if (rep.bins[b].n) {
      rep.bins[b].mean = sum[b] / static_cast<double>(rep.bins[b].n);
      ++nonempty;
    }
  if (nonempty < 2) throw Error(Errc::InsufficientBins, "fewer than 2 non-empty bins");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - rep.bins[member[i]].mean;
    sumsq[member[i]] += d * d;
  }

  const double N = static_cast<double>(x.size());
  double grand = 0;
  for (double v : y) grand += v;
  grand /= N;
  double ssb = 0, ssw = 0;
  for (int b = 0; b < bins; ++b) {
    auto& bin = rep.bins[b];
    if (!bin.n) continue;
    const double n = static_cast<double>(bin.n);
    const double sd = bin.n > 1 ? std::sqrt(sumsq[b] / (n - 1)) : 0.0;
    const double half = 1.96 * sd / std::sqrt(n);
    bin.ci_lo = bin.mean - half;
    bin.ci_hi = bin.mean + half;
    ssb += n * (bin.mean - grand) * (bin.mean - grand);
    ssw += sumsq[b];
  }
  rep.df_between = nonempty - 1;
  rep.df_within = static_cast<int>(x.size()) - nonempty;
  if (ssb <= 0 || rep.df_within <= 0) {
    rep.f = 0.0;
    rep.p = 1.0;
  } else if (ssw <= 0) {
    rep.f = std::numeric_limits<double>::infinity();
    rep.p = 0.0;
  } else {
    rep.f = (ssb / rep.df_between) / (ssw / rep.df_within);
    rep.p = f_p_upper(rep.f, rep.df_between, rep.df_within);
  }

  double best = std::numeric_limits<double>::infinity();
  double prev = -std::numeric_limits<double>::infinity();
  rep.monotone_increasing = true;
  for (std::size_t b = 0; b < rep.bins.size(); ++b) {
    if (!rep.bins[b].n) continue;
    if (rep.bins[b].mean < best) {
      best = rep.bins[b].mean;
      rep.min_bin = b;
    }
    if (rep.bins[b].mean <= prev) rep.monotone_increasing = false;
    prev = rep.bins[b].mean;
  }
  return rep;
}

}  // namespace vcx
