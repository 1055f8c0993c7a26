#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vcx/correlation.hpp"
#include "vcx/error.hpp"
#include "vcx/ranking.hpp"
#include "vcx/seed.hpp"

using namespace vcx;

namespace {

TrialRecord trial(std::uint64_t id, const std::string& l, const std::string& r, const std::string& choice,
                  std::int64_t ts = 0) {
  TrialRecord t;
  t.trial_id = id;
  t.left = l;
  t.right = r;
  t.choice = choice;
  t.timestamp_ms = ts ? ts : static_cast<std::int64_t>(id);
  return t;
}

std::vector<std::string> item_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("i" + std::to_string(i));
  return ids;
}

std::size_t splitmix_pick(std::uint64_t k, std::size_t i, std::size_t j) {
  return splitmix64(k * 31 + i * 7 + j) & 1 ? i : j;
}

}  // namespace

TEST_CASE("skill v and w against the normal-distribution oracle") {
  // Reference: scipy.stats.norm pdf/cdf.
  const std::vector<std::array<double, 3>> ref{{-3, 3.28309865493044, 0.9294408132147441},
                                               {0, 0.7978845608028654, 0.6366197723675814},
                                               {1.5, 0.13878975045885078, 0.22744722052070623},
                                               {4, 0.00013383446446857517, 0.0005353557695381803},
                                               {-10, 10.098093233962588, 0.9905546221751231}};
  for (const auto& [t, v, w] : ref) {
    CHECK(skill_v(t) == doctest::Approx(v).epsilon(1e-9));
    CHECK(skill_w(t) == doctest::Approx(w).epsilon(1e-9));
  }
  double prev = skill_v(-8);
  for (double t = -7.5; t <= 8; t += 0.5) {
    CHECK(skill_v(t) < prev);
    CHECK(skill_w(t) > 0.0);
    CHECK(skill_w(t) < 1.0);
    prev = skill_v(t);
  }
  CHECK(std::isfinite(skill_v(-60)));
  CHECK(skill_v(-60) == doctest::Approx(60.0).epsilon(1e-3));
}

TEST_CASE("update_pair: equal priors") {
  const RankingConfig cfg;
  const RatingState a, b;
  const auto [w, l] = update_pair(a, b, cfg);
  CHECK(w.mu > l.mu);
  CHECK(w.sigma < a.sigma);
  CHECK(l.sigma < b.sigma);
  CHECK(w.mu - cfg.mu0 == doctest::Approx(cfg.mu0 - l.mu).epsilon(1e-12));
  CHECK(w.sigma == doctest::Approx(l.sigma).epsilon(1e-12));
  CHECK(w.comparisons == 1);
}

TEST_CASE("update_pair: expected wins move less than upsets") {
  const RankingConfig cfg;
  RatingState fav, dog;
  const double c = std::sqrt(2 * cfg.beta * cfg.beta + 2 * (fav.sigma * fav.sigma + cfg.tau * cfg.tau));
  fav.mu = 25 + 1.5 * c;
  dog.mu = 25 - 1.5 * c;
  const auto expected = update_pair(fav, dog, cfg);
  const auto even = update_pair(RatingState{}, RatingState{}, cfg);
  const auto upset = update_pair(dog, fav, cfg);
  const double d_expected = expected.first.mu - fav.mu;
  const double d_even = even.first.mu - 25.0;
  const double d_upset = upset.first.mu - dog.mu;
  CHECK(d_expected > 0.0);
  CHECK(d_expected < d_even);
  CHECK(d_even < d_upset);
}

TEST_CASE("select_pairs: constraints and determinism") {
  const RankingConfig cfg;
  const std::vector<RatingState> same(20);
  for (std::size_t k : {5u, 10u, 30u, 79u}) {
    const auto pairs = select_pairs(same, k, {}, 3, cfg);
    CHECK(pairs.size() == k);
    std::vector<int> uses(20, 0);
    PairSet distinct;
    for (auto [i, j] : pairs) {
      CHECK(i < j);
      ++uses[i];
      ++uses[j];
      distinct.insert({i, j});
    }
    CHECK(distinct.size() == pairs.size());
    const int cap = static_cast<int>((2 * k + 19) / 20) + 1;
    CHECK(*std::max_element(uses.begin(), uses.end()) <= cap);
  }
  CHECK(select_pairs(same, 30, {}, 11, cfg) == select_pairs(same, 30, {}, 11, cfg));
  CHECK(select_pairs(same, 30, {}, 11, cfg) != select_pairs(same, 30, {}, 12, cfg));

  PairSet exclude;
  for (std::size_t j = 1; j < 20; ++j) exclude.insert({0, j});
  for (auto [i, j] : select_pairs(same, 60, exclude, 5, cfg)) CHECK(i != 0);
}

TEST_CASE("select_pairs: uncertain close pair beats a settled far pair") {
  const RankingConfig cfg;
  std::vector<RatingState> s(4);
  s[0] = {60, 0.5, 40};
  s[1] = {-10, 0.5, 40};
  s[2] = {25, 8, 0};
  s[3] = {25, 8, 0};
  CHECK(pair_information(s[2], s[3], cfg) > pair_information(s[0], s[1], cfg));
  const auto first = select_pairs(s, 1, {}, 1, cfg);
  REQUIRE(first.size() == 1);
  CHECK(first[0] == IndexPair{2, 3});
}

TEST_CASE("run_stage: validation leaves state untouched") {
  Ranker r(item_ids(3));
  std::vector<TrialRecord> bad{trial(1, "i0", "i1", "i0"), trial(2, "i0", "zz", "i0")};
  try {
    r.run_stage(bad);
    FAIL("unknown image accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownImage);
  }
  CHECK(r.total_updates() == 0);
  CHECK(r.history().empty());
  CHECK(r.states()[0].mu == 25.0);
  CHECK_THROWS_AS(r.run_stage({trial(3, "i0", "i1", "i2")}), Error);
}

TEST_CASE("run_stage: empty stages neither converge nor reset") {
  RankingConfig cfg;
  Ranker r(item_ids(3), cfg);
  const auto empty = r.run_stage({});
  CHECK(empty.valid_trials == 0);
  CHECK(!empty.counted);
  CHECK(empty.pearson == 1.0);
  CHECK(empty.spearman == 1.0);
  CHECK(!empty.converged);
  for (int k = 0; k < 5; ++k) r.run_stage({});
  CHECK(!r.converged());

  auto attention = trial(1, "i0", "__control__", "i0");
  attention.attention = true;
  const auto only_attention = r.run_stage({attention});
  CHECK(only_attention.valid_trials == 0);
  CHECK(r.states()[0].mu == 25.0);
}

TEST_CASE("run_stage: attention and excluded trials never alter ratings") {
  Ranker a(item_ids(4)), b(item_ids(4));
  std::vector<TrialRecord> base{trial(1, "i0", "i1", "i0"), trial(2, "i2", "i3", "i3")};
  auto noise = base;
  auto att = trial(3, "i1", "__control__", "__control__");
  att.attention = true;
  auto exc = trial(4, "i1", "i2", "i1");
  exc.excluded = true;
  noise.push_back(att);
  noise.push_back(exc);
  a.run_stage(base);
  b.run_stage(noise);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.states()[i].mu == b.states()[i].mu);
    CHECK(a.states()[i].sigma == b.states()[i].sigma);
  }
  CHECK(a.matrix() == b.matrix());
  CHECK(b.total_updates() == 2);
}

TEST_CASE("run_stage: timestamp order") {
  Ranker a(item_ids(3)), b(item_ids(3));
  a.run_stage({trial(1, "i0", "i1", "i0", 10), trial(2, "i1", "i2", "i2", 20), trial(3, "i0", "i2", "i2", 30)});
  b.run_stage({trial(3, "i0", "i2", "i2", 30), trial(1, "i0", "i1", "i0", 10), trial(2, "i1", "i2", "i2", 20)});
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.states()[i].mu == b.states()[i].mu);
}

TEST_CASE("final_scores") {
  Ranker r(item_ids(3));
  CHECK_THROWS_AS(r.final_scores(), Error);
  r.run_stage({trial(1, "i0", "i1", "i1")});
  const auto s = r.final_scores();
  CHECK(s[1].mu > s[0].mu);
  CHECK(s[2].mu == 25.0);
  CHECK(s[2].sigma == doctest::Approx(25.0 / 3.0));
  CHECK(s[1].normalized == 1.0);
  CHECK(s[0].normalized == 0.0);
  CHECK(scores_csv(s).rfind("image_id,mu,sigma,n_comparisons,normalized_score\n", 0) == 0);
}

TEST_CASE("final_scores: exhaustive tournament ranks the most frequent winner first") {
  const std::size_t n = 6;
  Ranker r(item_ids(n));
  std::vector<TrialRecord> stage;
  std::uint64_t id = 0;
  // Item k beats every lower-indexed item, twice round.
  for (int round = 0; round < 2; ++round)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        stage.push_back(trial(++id, "i" + std::to_string(i), "i" + std::to_string(j), "i" + std::to_string(j)));
  r.run_stage(stage);
  const auto s = r.final_scores();
  for (const auto& row : s) {
    CHECK(row.normalized >= 0.0);
    CHECK(row.normalized <= 1.0);
  }
  CHECK(s[n - 1].normalized == 1.0);
  for (std::size_t i = 1; i < n; ++i) CHECK(s[i].mu > s[i - 1].mu);
}

TEST_CASE("property: sigma is non-increasing with tau = 0") {
  RankingConfig cfg;
  cfg.tau = 0;
  Ranker r(item_ids(8), cfg);
  std::vector<double> prev(8, cfg.sigma0);
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto pairs = select_pairs(r.states(), 4, {}, k, cfg);
    std::vector<TrialRecord> st;
    for (auto [i, j] : pairs)
      st.push_back(trial(k * 10 + st.size() + 1, "i" + std::to_string(i), "i" + std::to_string(j),
                         "i" + std::to_string(splitmix_pick(k, i, j))));
    r.run_stage(st);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(r.states()[i].sigma <= prev[i] + 1e-15);
      prev[i] = r.states()[i].sigma;
    }
  }
}

TEST_CASE("property: sigma stays bounded with tau > 0") {
  const RankingConfig cfg;
  RatingState a, b;
  for (int k = 0; k < 200; ++k) {
    std::tie(a, b) = update_pair(a, b, cfg);
    std::swap(a, b);
    CHECK(a.sigma <= std::sqrt(cfg.sigma0 * cfg.sigma0 + (k + 1) * cfg.tau * cfg.tau));
    CHECK(a.sigma > 0.0);
  }
}

TEST_CASE("property: exchanging labels with inverted outcomes exchanges posteriors") {
  const RankingConfig cfg;
  auto swap_pq = [](std::string v) { return v == "p" ? std::string("q") : v == "q" ? std::string("p") : v; };
  for (int winner = 0; winner < 2; ++winner) {
    std::vector<TrialRecord> events{trial(1, "p", "q", winner ? "p" : "q"), trial(2, "q", "z", "z"),
                                    trial(3, "p", "z", "p"), trial(4, "q", "p", "q")};
    auto swapped = events;
    for (auto& t : swapped) {
      t.left = swap_pq(t.left);
      t.right = swap_pq(t.right);
      t.choice = swap_pq(t.choice);
    }
    Ranker r1({"p", "q", "z"}, cfg), r2({"p", "q", "z"}, cfg);
    r1.run_stage(events);
    r2.run_stage(swapped);
    CHECK(r2.states()[0].mu == r1.states()[1].mu);
    CHECK(r2.states()[1].mu == r1.states()[0].mu);
    CHECK(r2.states()[0].sigma == r1.states()[1].sigma);
    CHECK(r2.states()[2].mu == r1.states()[2].mu);
  }
}

TEST_CASE("property: shifting every mean leaves the ranking unchanged") {
  const RankingConfig cfg;
  std::vector<RatingState> s(10);
  for (std::size_t i = 0; i < 10; ++i) s[i] = {static_cast<double>((i * 7) % 10), 2.0 + static_cast<double>(i % 3), 0};
  auto shifted = s;
  for (auto& v : shifted) v.mu += 123.0;
  CHECK(select_pairs(s, 12, {}, 4, cfg) == select_pairs(shifted, 12, {}, 4, cfg));
  std::vector<double> m1, m2;
  for (std::size_t i = 0; i < 10; ++i) {
    m1.push_back(s[i].mu);
    m2.push_back(shifted[i].mu);
  }
  CHECK(average_ranks(m1) == average_ranks(m2));
  const auto u1 = update_pair(s[0], s[1], cfg), u2 = update_pair(shifted[0], shifted[1], cfg);
  CHECK(u2.first.mu - u1.first.mu == doctest::Approx(123.0).epsilon(1e-12));
  CHECK(u2.second.sigma == doctest::Approx(u1.second.sigma).epsilon(1e-12));
}

TEST_CASE("correlation helpers") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1}, flat{5, 5, 5, 5};
  CHECK(pearson(a, b) == doctest::Approx(1.0));
  CHECK(pearson(a, c) == doctest::Approx(-1.0));
  CHECK(pearson(a, flat) == 0.0);
  CHECK(pearson(flat, flat) == 1.0);
  CHECK(spearman(std::vector<double>{1, 10, 100, 1000}, a) == doctest::Approx(1.0));
  CHECK(average_ranks(std::vector<double>{3, 1, 3, 2}) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("trial log round trip") {
  auto t = trial(42, "a", "b", "b", 1234567);
  t.stage = 3;
  t.session_id = "s1-abc";
  t.rater_id = "r\"1";
  t.latency = 1.25;
  t.attention = true;
  const auto back = trial_from_json(trial_to_json(t));
  CHECK(back.trial_id == 42);
  CHECK(back.stage == 3);
  CHECK(back.session_id == t.session_id);
  CHECK(back.rater_id == t.rater_id);
  CHECK(back.choice == "b");
  CHECK(back.latency == 1.25);
  CHECK(back.attention);
  CHECK(back.timestamp_ms == 1234567);

  const auto path = std::filesystem::temp_directory_path() / "vcx_trial_log_test.jsonl";
  {
    std::ofstream out(path);
    append_trial(out, t);
    out << "{\"type\":\"stage_close\",\"stage\":0}\n";
    append_trial(out, trial(43, "a", "b", "a"));
  }
  const auto logged = read_trial_log(path);
  REQUIRE(logged.size() == 2);
  CHECK(logged[1].trial_id == 43);
  std::filesystem::remove(path);
}

TEST_CASE("simulation: 10 items, 500 trials") {
  SimulationConfig cfg;
  cfg.items = 10;
  cfg.trials = 500;
  cfg.latent_range = 9.0;
  cfg.seed = 1;
  const auto res = simulate_study(cfg);
  CHECK(res.final_spearman >= 0.9);
  CHECK(res.trials.size() == 500);
  CHECK(spearman(res.latent, [&] {
          std::vector<double> m;
          for (const auto& s : res.scores) m.push_back(s.mu);
          return m;
        }()) == doctest::Approx(res.final_spearman));
  const auto again = simulate_study(cfg);
  for (std::size_t i = 0; i < res.scores.size(); ++i) CHECK(again.scores[i].mu == res.scores[i].mu);
  cfg.items = 1;
  CHECK_THROWS_AS(simulate_study(cfg), Error);
}

TEST_CASE("simulation: study-scale convergence within 14 stages") {
  // 1,800 images, 20 raters x 79 pairs per stage.
  SimulationConfig cfg;
  cfg.items = 1800;
  cfg.stage_size = 79 * 20;
  cfg.trials = 14 * cfg.stage_size;
  cfg.seed = 3;
  const auto res = simulate_study(cfg);
  REQUIRE(res.converged_stage.has_value());
  CHECK(*res.converged_stage <= 13);
  CHECK(*res.converged_stage >= 3);
  MESSAGE("converged at stage " << *res.converged_stage << ", Spearman to latent " << res.final_spearman);
}
