#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "vcx/attribution.hpp"
#include "vcx/csv.hpp"
#include "vcx/error.hpp"
#include "vcx/metric_names.hpp"

namespace vcx::cli {
namespace {

struct AttributeArgs {
  std::filesystem::path metrics;
  std::optional<std::filesystem::path> scores;
  int components = 5;
  int bootstrap = 1000;
  std::string group_tag;
  std::vector<std::string> exclude;
  std::filesystem::path out_dir = "attribution";
};

std::string fmt(double v) { return csv::format_double(v); }

std::string matrix_csv(const std::vector<std::string>& cols, const Eigen::MatrixXd& M) {
  std::vector<std::string> header{"metric"};
  header.insert(header.end(), cols.begin(), cols.end());
  std::string out = csv::join(header) + "\n";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<std::string> cells{cols[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < M.cols(); ++j) cells.push_back(fmt(M(i, j)));
    out += csv::join(cells) + "\n";
  }
  return out;
}

void run_attribute(const AttributeArgs& a, const GlobalOptions& g) {
  if (a.components < 1) throw ConfigError("--components must be at least 1");
  if (a.bootstrap < 1) throw ConfigError("--bootstrap must be at least 1");
  AnalysisConfig cfg;
  cfg.components = a.components;
  cfg.bootstrap.resamples = a.bootstrap;
  cfg.bootstrap.seed = g.seed_or(7);
  cfg.bootstrap.threads = g.job_count();
  for (const auto& name : a.exclude) {
    const auto m = parse_metric(name);
    if (!m) throw ConfigError("--exclude: unknown metric " + name);
    cfg.exclude.emplace_back(column_name(*m));
  }

  Dataset data = load_dataset(a.metrics);
  if (a.scores) data = join_metrics_scores(data, load_dataset(*a.scores));
  std::vector<std::string> warnings;
  for (Eigen::Index c = 0; c < data.metrics.cols(); ++c) {
    const auto& name = data.metric_columns[static_cast<std::size_t>(c)];
    if (data.metrics.col(c).array().isNaN().all() &&
        std::find(cfg.exclude.begin(), cfg.exclude.end(), name) == cfg.exclude.end()) {
      warnings.push_back(name + " is empty in every row; excluded");
      cfg.exclude.push_back(name);
    }
  }

  const AnalysisResult res = subgroup_analysis(data, a.group_tag, cfg);
  warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
  const auto& cols = res.model.columns;
  const DesignMatrix X = data.design(data.rows_with_tag(a.group_tag), cols);
  const CorrelationMatrix corr = pearson_matrix(X.X, cols);

  std::ostringstream settings;
  settings << "attribute fit;components=" << a.components << ";bootstrap=" << a.bootstrap
           << ";group_tag=" << a.group_tag << ";exclude=" << csv::join(cfg.exclude);
  RunManifest m = start_manifest(g, settings.str());
  m.seed = cfg.bootstrap.seed;
  record_input(m, a.metrics);
  if (a.scores) record_input(m, *a.scores);

  const double z = 1.959963984540054;
  std::string coef = "metric,coefficient,raw_coefficient,std_error,ci_lo,ci_hi,p_value,significant,f2,r2_without\n";
  std::string table = "metric,statistic,value\n";
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    const double b = res.model.coefficients(i), se = res.bootstrap.std_error(i);
    coef += csv::join({cols[j], fmt(b), fmt(res.model.raw_coefficients(i)), fmt(se), fmt(b - z * se), fmt(b + z * se),
                       fmt(res.bootstrap.p_value(i)), res.bootstrap.significant[j] ? "1" : "0",
                       fmt(res.effects.f2[j]), fmt(res.effects.r2_drop[j])}) +
            "\n";
    for (const auto& [stat, v] : std::vector<std::pair<std::string, double>>{
             {"coefficient", b}, {"ci_lo", b - z * se}, {"ci_hi", b + z * se},
             {"p_value", res.bootstrap.p_value(i)}, {"f2", res.effects.f2[j]}})
      table += csv::join({cols[j], stat, fmt(v)}) + "\n";
  }
  std::string r2 = "components,r2\n";
  for (std::size_t k = 0; k < res.r2_by_components.size(); ++k)
    r2 += std::to_string(k + 1) + "," + fmt(res.r2_by_components[k]) + "\n";

  write_output(m, a.out_dir / "coefficients.csv", coef);
  write_output(m, a.out_dir / "plot_table.csv", table);
  write_output(m, a.out_dir / "correlation.csv", matrix_csv(cols, corr.r));
  write_output(m, a.out_dir / "correlation_p.csv", matrix_csv(cols, corr.p));
  write_output(m, a.out_dir / "r2_curve.csv", r2);

  for (const auto& [name, bins] : {std::pair<std::string, int>{"O.TiR", kTirTrendBins}, {"O.MeC", kMecTrendBins}}) {
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) continue;
    const auto c = static_cast<Eigen::Index>(it - cols.begin());
    std::vector<double> x(X.X.col(c).data(), X.X.col(c).data() + X.rows()), y(X.y.data(), X.y.data() + X.rows());
    try {
      const TrendReport t = binned_trend(x, y, bins);
      std::string out = "bin,lo,hi,n,mean,ci_lo,ci_hi\n";
      for (std::size_t b = 0; b < t.bins.size(); ++b)
        out += csv::join({std::to_string(b), fmt(t.bins[b].lo), fmt(t.bins[b].hi), std::to_string(t.bins[b].n),
                          fmt(t.bins[b].mean), fmt(t.bins[b].ci_lo), fmt(t.bins[b].ci_hi)}) +
               "\n";
      out += "# F=" + fmt(t.f) + " p=" + fmt(t.p) + " df=" + std::to_string(t.df_between) + "," +
             std::to_string(t.df_within) + "\n";
      write_output(m, a.out_dir / ("trend_" + name + ".csv"), out);
    } catch (const Error& e) {
      warnings.push_back(name + " trend: " + e.what());
    }
  }

  nlohmann::ordered_json summary = {{"group_tag", a.group_tag},
                                    {"rows", res.rows},
                                    {"components", res.model.components},
                                    {"r2", res.model.r2},
                                    {"bootstrap_resamples", res.bootstrap.resamples},
                                    {"bootstrap_skipped", res.bootstrap.skipped},
                                    {"metrics", cols},
                                    {"warnings", warnings}};
  write_output(m, a.out_dir / "summary.json", summary.dump(2) + "\n");
  m.finished_at = utc_timestamp();
  m.write(a.out_dir / "manifest.json");

  for (const auto& w : warnings) std::cerr << "vcx: warning: " << w << "\n";
  std::cout << "rows " << res.rows << ", components " << res.model.components << ", R2 " << fmt(res.model.r2) << "\n";
  std::cout << coef;
}

}  // namespace

void register_attribute(CLI::App& app, GlobalOptions& g) {
  auto* attribute = app.add_subcommand("attribute", "Metric attribution against perceived complexity");
  attribute->require_subcommand(1);
  auto a = std::make_shared<AttributeArgs>();
  auto* fit = attribute->add_subcommand("fit", "PLS fit, bootstrap p-values, effect sizes and correlations");
  fit->add_option("--metrics", a->metrics, "Metric CSV (O.* columns)")->required()->check(CLI::ExistingFile);
  fit->add_option("--scores", a->scores, "Score CSV joined on image_id (default: scores in --metrics)")
      ->check(CLI::ExistingFile);
  fit->add_option("--components", a->components, "PLS components")->capture_default_str();
  fit->add_option("--bootstrap", a->bootstrap, "Bootstrap resamples")->capture_default_str();
  fit->add_option("--group-tag", a->group_tag, "Restrict to rows carrying this tag");
  fit->add_option("--exclude", a->exclude, "Metrics to leave out, e.g. O.TiR")->delimiter(',');
  fit->add_option("--out-dir", a->out_dir, "Report directory")->capture_default_str();
  fit->callback([a, &g] { run_attribute(*a, g); });
}

}  // namespace vcx::cli
