// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "copas/error.h"
#include "copas/evaluation.h"
#include "copas/rng.h"
#include "copas/selection.h"
#include "support/generators.h"

using namespace copas;
using copas::testing::throws_code;

namespace {

Groups random_groups(SplitMix64 &rng, std::size_t count, std::size_t max_size) {
  std::vector<int> sizes;
  std::size_t n = 0;
  for (std::size_t g = 0; g < count; ++g) {
    sizes.push_back(1 + static_cast<int>(rng.uniform_index(max_size)));
    n += static_cast<std::size_t>(sizes.back());
  }
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  rows = rng.sample_without_replacement(rows, n);
  Groups groups;
  std::size_t k = 0;
  for (std::size_t g = 0; g < count; ++g) {
    auto &members = groups[static_cast<int>(g) + 1];
    for (int i = 0; i < sizes[g]; ++i) members.push_back(rows[k++]);
    std::sort(members.begin(), members.end());
  }
  return groups;
}

void check_partition(const DatasetSplit &s, std::size_t n) {
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  CHECK(std::is_sorted(s.test.begin(), s.test.end()));
  std::vector<int> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<int> expected(n);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);
  CHECK_FALSE(s.test.empty());
}

FeatureMatrix synthetic_features(SplitMix64 &rng, std::size_t n, std::vector<double> &targets,
                                 bool step) {
  FeatureMatrix m;
  m.columns = {{"D:x0", Block::kDescriptors}, {"D:x1", Block::kDescriptors}, {"D:x2", Block::kDescriptors}};
  targets.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = rng.uniform01();
    const double x1 = rng.uniform01();
    const double x2 = rng.uniform01();
    m.row_ids.push_back("m" + std::to_string(i));
    m.values.push_back({x0, x1, x2});
    targets.push_back(step ? (x0 > 0.5 ? 1.0 : 0.0) : 3 * x0 + x1 * x2 + 0.3 * rng.uniform01());
  }
  return m;
}

EvalConfig quick_config(SplitMethod method, int repeats) {
  EvalConfig c;
  c.method = method;
  c.repeats = repeats;
  c.master_seed = 7;
  c.model = TrainConfig::defaults(ModelKind::kGradientBoosting);
  return c;
}

} // namespace

TEST_CASE("scaffold split examples") {
  const Groups ab{{1, {0, 1, 2}}, {2, {3, 4, 5, 6, 7}}};
  const DatasetSplit s = msc_split(ab, 1);
  CHECK(s.test.size() == 3);
  CHECK(msc_test_size(ab) == 3);
  CHECK(throws_code([] { msc_split(Groups{{1, {0}}}, 1); }, ErrorCode::kDegenerateSplit));
  CHECK(throws_code([] { msc_split(Groups{{1, {0, 1}}, {2, {}}}, 1); }, ErrorCode::kEmptyGroup));
  CHECK(msc_split(ab, 99).test == msc_split(ab, 99).test);
}

TEST_CASE("random split examples") {
  CHECK(random_split(20, 0.1, 3).test.size() == 2);
  CHECK(random_split(129, 0.1, 3).test.size() == 13);
  CHECK(random_split(24, 0.1, 3).test.size() == 3);
  CHECK(random_split(129, 0.1, 5).test == random_split(129, 0.1, 5).test);
  CHECK(random_split(129, 0.1, 5).test != random_split(129, 0.1, 6).test);
  CHECK(throws_code([] { random_split(1, 0.5, 0); }, ErrorCode::kDegenerateSplit));
  CHECK(throws_code([] { random_split(10, 1.0, 0); }, ErrorCode::kDegenerateSplit));
}

TEST_CASE("leave-one-group-out examples") {
  const auto two = logo_splits(Groups{{1, {0, 1}}, {2, {2}}});
  REQUIRE(two.size() == 2);
  CHECK(two[0].test == std::vector<int>{0, 1});
  CHECK(two[0].train == std::vector<int>{2});
  CHECK(two[1].test == std::vector<int>{2});
  CHECK(two[1].group == 2);
  SplitMix64 rng(1);
  CHECK(logo_splits(random_groups(rng, 9, 20)).size() == 9);
  CHECK(throws_code([] { logo_splits(Groups{{1, {0, 1}}}); }, ErrorCode::kSingleGroup));
}

TEST_CASE("property: every splitter partitions the rows, 1000 seeds") {
  SplitMix64 rng(2);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Groups g = random_groups(rng, 2 + rng.uniform_index(9), 12);
    std::size_t n = 0;
    std::size_t expected = 0;
    for (const auto &[id, m] : g) {
      n += m.size();
      expected += m.size() <= 3 ? 1 : 2;
    }
    const DatasetSplit msc = msc_split(g, seed);
    check_partition(msc, n);
    CHECK(msc.test.size() == expected);
    for (const auto &[id, members] : g) {
      std::size_t in_test = 0;
      for (int i : members) in_test += std::binary_search(msc.test.begin(), msc.test.end(), i) ? 1 : 0;
      CHECK(in_test == (members.size() <= 3 ? 1u : 2u));
    }
    const DatasetSplit rnd = random_split(n, 0.1, seed);
    check_partition(rnd, n);
    CHECK(rnd.test.size() == static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(n))));
    const auto logo = logo_splits(g);
    CHECK(logo.size() == g.size());
    for (const auto &s : logo) check_partition(s, n);
  }
}

TEST_CASE("property: scaffold-split draws are roughly uniform within a group") {
  const Groups g{{1, {0, 1, 2, 3, 4}}};
  std::vector<int> hits(5, 0);
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    for (int i : msc_split(g, seed).test) ++hits[static_cast<std::size_t>(i)];
  }
  // Each row is drawn with probability 2/5: 2000 expected, sd about 35.
  for (int h : hits) CHECK(std::abs(h - 2000) < 200);
}

TEST_CASE("metric examples") {
  const std::vector<double> a{1, 2, 3};
  CHECK(mae(a, a) == 0.0);
  CHECK(std::fabs(mae(a, std::vector<double>{1.5, 2.5, 2.0}) - 2.0 / 3.0) < 1e-12);
  CHECK(mae(std::vector<double>{0}, std::vector<double>{2}) == 2.0);
  CHECK(throws_code([] { mae(std::vector<double>{}, std::vector<double>{}); }, ErrorCode::kEmpty));
  CHECK(throws_code([] { mae(std::vector<double>{1}, std::vector<double>{1, 2}); }, ErrorCode::kLengthMismatch));

  CHECK(average_ranks(std::vector<double>{1, 2, 2, 3}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 35, 100}) == doctest::Approx(1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}) == doctest::Approx(-1.0));
  // Ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4): 4.5 / sqrt(4.5 * 5).
  CHECK(std::fabs(spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 3, 4}) -
                  4.5 / std::sqrt(22.5)) < 1e-12);
  CHECK(std::fabs(spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 3, 4}) - 0.9487) < 1e-3);
  CHECK(throws_code([] { spearman(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}); },
                    ErrorCode::kConstantVector));
}

TEST_CASE("property: spearman is invariant under monotone transforms") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(20);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.uniform_index(8));
      y[i] = rng.uniform01();
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    const double base = spearman(x, y);
    const double a = 0.1 + rng.uniform01();
    std::vector<double> fx, gy, hy;
    for (double v : x) fx.push_back(std::exp(a * v) + v * v * v);
    for (double v : y) gy.push_back(-1.0 / (1.0 + v));  // increasing on [0, 1)
    for (double v : y) hy.push_back(-v * v * v);        // decreasing
    CHECK(spearman(fx, y) == doctest::Approx(base).epsilon(1e-12));
    CHECK(spearman(x, gy) == doctest::Approx(base).epsilon(1e-12));
    CHECK(spearman(x, hy) == doctest::Approx(-base).epsilon(1e-12));
  }
}

TEST_CASE("summary statistics use n - 1") {
  const MetricSummary s = summarize(std::vector<double>{1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.count == 4);
  CHECK(summarize(std::vector<double>{7}).std == 0.0);
}

TEST_CASE("single repeat matches a manual run") {
  SplitMix64 rng(13);
  std::vector<double> y;
  const FeatureMatrix x = synthetic_features(rng, 40, y, false);
  const EvalConfig config = quick_config(SplitMethod::kRandom, 1);
  const EvalReport report = repeated_eval(x, y, nullptr, config);
  REQUIRE(report.results.size() == 1);

  const std::uint64_t seed = derive_seed(config.master_seed, 0);
  const DatasetSplit split = random_split(40, 0.1, seed);
  const RepeatResult manual = run_split(x, y, split, config, derive_seed(seed, 1));
  CHECK(report.results[0].mae == manual.mae);
  CHECK(report.results[0].spearman == manual.spearman);
  CHECK(report.mae.mean == manual.mae);

  // Independent recomputation from the public building blocks.
  FeatureMatrix train, test;
  train.columns = test.columns = x.columns;
  std::vector<double> ty, vy;
  for (int i : split.train) {
    train.values.push_back(x.values[static_cast<std::size_t>(i)]);
    ty.push_back(y[static_cast<std::size_t>(i)]);
  }
  for (int i : split.test) {
    test.values.push_back(x.values[static_cast<std::size_t>(i)]);
    vy.push_back(y[static_cast<std::size_t>(i)]);
  }
  const SelectionPipeline p = SelectionPipeline::fit(train, config.thresholds);
  TrainConfig tc = config.model;
  tc.seed = derive_seed(seed, 1);
  const Model m = fit_model(p.apply(train).values, ty, tc);
  CHECK(mae(predict(m, p.apply(test).values), vy) == manual.mae);
}

TEST_CASE("noiseless step data is learned almost exactly") {
  SplitMix64 rng(17);
  std::vector<double> y;
  const FeatureMatrix x = synthetic_features(rng, 200, y, true);
  const EvalReport r = repeated_eval(x, y, nullptr, quick_config(SplitMethod::kRandom, 20));
  CHECK(r.mae.mean < 0.05);
}

TEST_CASE("test rows never influence fitting") {
  SplitMix64 rng(19);
  std::vector<double> y;
  FeatureMatrix x = synthetic_features(rng, 30, y, false);
  const EvalConfig config = quick_config(SplitMethod::kRandom, 1);
  const DatasetSplit split = random_split(30, 0.2, 5);
  const RepeatResult before = run_split(x, y, split, config, 9);

  // Blow up test-row features and targets: maxima, variances and the model
  // would all change if test rows leaked into fitting.
  FeatureMatrix leaked = x;
  std::vector<double> y2 = y;
  for (int i : split.test) {
    for (double &v : leaked.values[static_cast<std::size_t>(i)]) v *= 1000.0;
    y2[static_cast<std::size_t>(i)] = -500.0;
  }
  FeatureMatrix train;
  train.columns = x.columns;
  std::vector<double> ty;
  for (int i : split.train) {
    train.values.push_back(x.values[static_cast<std::size_t>(i)]);
    ty.push_back(y[static_cast<std::size_t>(i)]);
  }
  const SelectionPipeline p = SelectionPipeline::fit(train, config.thresholds);
  TrainConfig tc = config.model;
  tc.seed = 9;
  const Model m = fit_model(p.apply(train).values, ty, tc);
  FeatureMatrix test;
  test.columns = x.columns;
  std::vector<double> vy;
  for (int i : split.test) {
    test.values.push_back(leaked.values[static_cast<std::size_t>(i)]);
    vy.push_back(y2[static_cast<std::size_t>(i)]);
  }
  const RepeatResult after = run_split(leaked, y2, split, config, 9);
  CHECK(after.feature_count == before.feature_count);
  CHECK(after.mae == mae(predict(m, p.apply(test).values), vy));
}

TEST_CASE("serial and parallel evaluation give identical reports") {
  SplitMix64 rng(23);
  std::vector<double> y;
  const FeatureMatrix x = synthetic_features(rng, 36, y, false);
  Groups g;
  for (int i = 0; i < 36; ++i) g[i % 5 + 1].push_back(i);
  for (SplitMethod method : {SplitMethod::kMsc, SplitMethod::kRandom, SplitMethod::kLogo}) {
    for (ModelKind kind : {ModelKind::kGradientBoosting, ModelKind::kRandomForest, ModelKind::kSvr}) {
      EvalConfig c = quick_config(method, 12);
      c.model = TrainConfig::defaults(kind);
      c.threads = 1;
      const std::string serial = report_to_json(repeated_eval(x, y, &g, c));
      c.threads = 5;
      CHECK(report_to_json(repeated_eval(x, y, &g, c)) == serial);
    }
  }
}

TEST_CASE("leave-one-group-out runs once per group and reports per group") {
  SplitMix64 rng(29);
  std::vector<double> y;
  const FeatureMatrix x = synthetic_features(rng, 45, y, false);
  Groups g;
  for (int i = 0; i < 45; ++i) g[i % 9 + 1].push_back(i);
  const EvalReport r = repeated_eval(x, y, &g, quick_config(SplitMethod::kLogo, 200));
  REQUIRE(r.results.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(r.results[i].group == static_cast<int>(i) + 1);
  const std::string table = reports_to_table(std::span<const EvalReport>(&r, 1));
  CHECK(table.find("±") != std::string::npos);
  for (int group = 1; group <= 9; ++group) {
    CHECK(table.find("group " + std::to_string(group)) != std::string::npos);
  }
}

TEST_CASE("undefined rank correlations are counted, not averaged") {
  // Constant targets make every test-set Spearman undefined.
  SplitMix64 rng(31);
  std::vector<double> y;
  const FeatureMatrix x = synthetic_features(rng, 20, y, false);
  std::fill(y.begin(), y.end(), 5.0);
  const EvalReport r = repeated_eval(x, y, nullptr, quick_config(SplitMethod::kRandom, 4));
  CHECK(r.undefined_spearman == 4);
  CHECK(r.spearman.count == 0);
  CHECK(r.mae.mean == doctest::Approx(0.0));
  CHECK(report_to_json(r).find("null") != std::string::npos);
}

TEST_CASE("invalid evaluation requests") {
  SplitMix64 rng(37);
  std::vector<double> y;
  const FeatureMatrix x = synthetic_features(rng, 20, y, false);
  CHECK(throws_code([&] { repeated_eval(x, y, nullptr, quick_config(SplitMethod::kRandom, 0)); },
                    ErrorCode::kInvalidConfig));
  CHECK(throws_code([&] { repeated_eval(x, y, nullptr, quick_config(SplitMethod::kMsc, 3)); }, ErrorCode::kUsage));
  std::vector<double> short_y(y.begin(), y.end() - 1);
  CHECK(throws_code([&] { repeated_eval(x, short_y, nullptr, quick_config(SplitMethod::kRandom, 3)); },
                    ErrorCode::kLengthMismatch));
  CHECK(split_method_from_name("logo") == SplitMethod::kLogo);
  CHECK_FALSE(split_method_from_name("kfold").has_value());
}
