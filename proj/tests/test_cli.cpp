#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vcx/codec.hpp"
#include "vcx/csv.hpp"

#include <json.hpp>

using namespace vcx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run vcx_cli(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("'") + VCX_CLI_PATH + "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vcx_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_catalog(const fs::path& dir) {
  const std::vector<ImageRaster> images{test::noise_image(64, 48, 1), test::horizontal_gradient(64, 64),
                                        test::checkerboard(80, 60, {0, 0, 0}, {255, 255, 255})};
  std::ofstream cat(dir / "catalog.csv");
  cat << "id,path,tags\n";
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string name = "chart" + std::to_string(i) + ".png";
    const auto bytes = encode_png(images[i]);
    std::ofstream(dir / name, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                                       static_cast<std::streamsize>(bytes.size()));
    cat << "chart" << i << "," << name << "," << (i == 1 ? "bar" : "heatmap;grid") << "\n";
  }
  return dir / "catalog.csv";
}

std::string dict_arg() { return "--dict '" + test::shipped_data("namable_colors.csv").string() + "'"; }

}  // namespace

TEST_CASE("cli: metrics compute writes one row per image") {
  const auto dir = scratch("metrics");
  const auto catalog = write_catalog(dir);
  const auto out = dir / "metrics.csv";
  const Run r = vcx_cli("--jobs 2 metrics compute --catalog '" + catalog.string() + "' --out '" + out.string() +
                            "' " + dict_arg(),
                        dir);
  INFO(r.err);
  REQUIRE(r.code == 0);
  const csv::Table t = csv::read_file(out);
  CHECK(t.rows.size() == 3);
  CHECK(t.column("O.IE"));
  CHECK(t.column("norm.O.IE"));
  const auto mec = *t.column("O.MeC");
  for (const auto& row : t.rows) CHECK(std::stod(row[mec]) >= 1.0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "metrics.csv.manifest.json"));
  CHECK(manifest["output_hashes"].size() == 1);
  CHECK_FALSE(manifest["input_hashes"].empty());

  // Same inputs, same bytes; the manifest agrees up to timestamps.
  const auto first = slurp(out);
  REQUIRE(vcx_cli("--jobs 1 metrics compute --catalog '" + catalog.string() + "' --out '" + out.string() + "' " +
                      dict_arg(),
                  dir)
              .code == 0);
  CHECK(slurp(out) == first);
  auto again = nlohmann::json::parse(slurp(dir / "metrics.csv.manifest.json"));
  for (auto* m : {&again, const_cast<nlohmann::json*>(&manifest)}) {
    m->erase("started_at");
    m->erase("finished_at");
    m->erase("command");
  }
  CHECK(again == manifest);
  fs::remove_all(dir);
}

TEST_CASE("cli: configuration errors exit 2 and name the flag") {
  const auto dir = scratch("config");
  const auto catalog = write_catalog(dir);
  const Run r = vcx_cli("metrics compute --catalog '" + catalog.string() + "' --out '" + (dir / "m.csv").string() + "'",
                        dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("--dict") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "m.csv"));

  const Run only = vcx_cli("metrics compute --catalog '" + catalog.string() + "' --out '" +
                               (dir / "m.csv").string() + "' --only O.ED,O.IE",
                           dir);
  CHECK(only.code == 0);
  const csv::Table t = csv::read_file(dir / "m.csv");
  CHECK(t.rows[0][*t.column("O.MeC")].empty());
  CHECK_FALSE(std::isnan(std::stod(t.rows[0][*t.column("O.ED")])));

  CHECK(vcx_cli("metrics compute --out x.csv", dir).code == 2);
  CHECK(vcx_cli("rank simulate --items 1", dir).code == 2);
  CHECK(vcx_cli("no-such-command", dir).code == 2);
  CHECK(vcx_cli("--version", dir).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("cli: rank simulate") {
  const auto dir = scratch("simulate");
  const Run r = vcx_cli("--seed 3 rank simulate --items 10 --trials 500 --latent-range 9 --out-dir '" +
                            (dir / "sim").string() + "'",
                        dir);
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("stage,trials,spearman_truth,pearson_prev", 0) == 0);
  const auto pos = r.out.find("final_spearman ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 15)) >= 0.9);
  for (const char* f : {"scores.csv", "curve.csv", "trials.jsonl", "latent.csv", "manifest.json"})
    CHECK(fs::exists(dir / "sim" / f));
  const Run again = vcx_cli("--seed 3 rank simulate --items 10 --trials 500 --latent-range 9", dir);
  CHECK(again.out == r.out);
  fs::remove_all(dir);
}

TEST_CASE("cli: attribute fit") {
  const auto dir = scratch("attribute");
  {
    std::ofstream m(dir / "metrics.csv");
    std::ofstream s(dir / "scores.csv");
    m << "image_id,tags,O.IE,O.ED,O.CF\n";
    s << "image_id,normalized_score\n";
    for (int i = 0; i < 40; ++i) {
      const double a = std::sin(i * 1.1), b = std::cos(i * 0.7), c = std::sin(i * 0.3 + 1);
      m << "img" << i << "," << (i % 2 ? "bar" : "map") << "," << a << "," << b << "," << c << "\n";
      s << "img" << i << "," << 2 * a - b + 0.1 * std::sin(i * 5.0) << "\n";
    }
    std::ofstream bad(dir / "other.csv");
    bad << "image_id,normalized_score\nzzz,1\n";
  }
  const std::string base = "attribute fit --metrics '" + (dir / "metrics.csv").string() + "' --components 2 --bootstrap 100";
  const Run r = vcx_cli(base + " --scores '" + (dir / "scores.csv").string() + "' --out-dir '" + (dir / "rep").string() + "'",
                        dir);
  INFO(r.err);
  REQUIRE(r.code == 0);
  const csv::Table coef = csv::read_file(dir / "rep" / "coefficients.csv");
  CHECK(coef.rows.size() == 3);
  for (const char* f : {"plot_table.csv", "correlation.csv", "correlation_p.csv", "r2_curve.csv", "summary.json",
                        "manifest.json"})
    CHECK(fs::exists(dir / "rep" / f));
  const Run bad = vcx_cli(base + " --scores '" + (dir / "other.csv").string() + "'", dir);
  CHECK(bad.code == 1);
  fs::remove_all(dir);
}
