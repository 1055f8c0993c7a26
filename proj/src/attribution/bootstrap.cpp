#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "vcx/attribution.hpp"
#include "vcx/error.hpp"

namespace vcx {

BootstrapReport bootstrap_coefficients(const DesignMatrix& data, int components, const BootstrapOptions& opts) {
  if (opts.resamples < 1) throw Error(Errc::InvalidInput, "resample count must be >= 1");
  const PlsModel full = fit_pls(data, components);
  const Eigen::Index n = data.rows(), p = data.cols();
  const int B = opts.resamples;

  Eigen::MatrixXd coefs(B, p);
  std::vector<char> ok(static_cast<std::size_t>(B), 0);

  auto run = [&](int b) {
    std::mt19937_64 rng(splitmix64(opts.seed + static_cast<std::uint64_t>(b)));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = pick(rng);
    try {
      coefs.row(b) = fit_pls(data.rows_subset(rows), components).coefficients.transpose();
      ok[static_cast<std::size_t>(b)] = 1;
    } catch (const Error&) {
      // Counted as skipped below.
    }
  };

  int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, B);
  if (threads == 1) {
    for (int b = 0; b < B; ++b) run(b);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int b = t; b < B; b += threads) run(b);
      });
    for (auto& th : pool) th.join();
  }

  BootstrapReport rep;
  rep.columns = data.columns;
  rep.estimate = full.coefficients;
  rep.resamples = B;
  rep.skipped = static_cast<int>(std::count(ok.begin(), ok.end(), 0));
  if (rep.skipped > opts.max_skip_fraction * B)
    throw Error(Errc::RankDeficient, std::to_string(rep.skipped) + " of " + std::to_string(B) +
                                         " bootstrap resamples could not be fit");
  const int valid = B - rep.skipped;
  rep.samples.resize(valid, p);
  for (int b = 0, k = 0; b < B; ++b)
    if (ok[static_cast<std::size_t>(b)]) rep.samples.row(k++) = coefs.row(b);

  rep.std_error.resize(p);
  rep.p_value.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = rep.samples.col(j).array();
    const double mean = col.mean();
    rep.std_error(j) = valid > 1 ? std::sqrt((col - mean).square().sum() / (valid - 1)) : 0.0;
    const double le = (col <= 0.0).cast<double>().sum() / valid;
    const double ge = (col >= 0.0).cast<double>().sum() / valid;
    rep.p_value(j) = std::clamp(2.0 * std::min(le, ge), 1.0 / valid, 1.0);
    rep.significant.push_back(rep.p_value(j) < opts.alpha);
  }
  return rep;
}

}  // namespace vcx
