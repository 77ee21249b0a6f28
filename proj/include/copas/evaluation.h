// SPDX-License-Identifier: Apache-2.0
//
// Dataset splitters, regression metrics, and the repeated train/test harness.

#ifndef COPAS_EVALUATION_H_
#define COPAS_EVALUATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copas/features.h"
#include "copas/models.h"
#include "copas/selection.h"

namespace copas {

// Group id -> ascending row indices.
using Groups = std::map<int, std::vector<int>>;

enum class SplitMethod { kMsc, kRandom, kLogo };

std::string_view split_method_name(SplitMethod m);
std::optional<SplitMethod> split_method_from_name(std::string_view name);

struct DatasetSplit {
  std::vector<int> train;  // ascending
  std::vector<int> test;   // ascending
  SplitMethod method = SplitMethod::kRandom;
  std::optional<int> group;  // held-out group for LOGO
  std::uint64_t seed = 0;
};

// One test row from every group of size <= 3, two from larger groups, drawn
// uniformly without replacement in ascending group-id order.
DatasetSplit msc_split(const Groups &groups, std::uint64_t seed);

// Number of test rows msc_split produces for these groups.
std::size_t msc_test_size(const Groups &groups);

// ceil(n * test_fraction) test rows drawn without replacement.
DatasetSplit random_split(std::size_t n, double test_fraction, std::uint64_t seed);

// One split per group, holding out that whole group.
std::vector<DatasetSplit> logo_splits(const Groups &groups);

double mae(std::span<const double> pred, std::span<const double> truth);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks.
double spearman(std::span<const double> pred, std::span<const double> truth);

struct EvalConfig {
  SplitMethod method = SplitMethod::kMsc;
  double test_fraction = 0.1;
  int repeats = 200;  // ignored for LOGO, which runs once per group
  std::uint64_t master_seed = 0;
  TrainConfig model;
  SelectionThresholds thresholds;
  std::set<Block> selection_scope{Block::kDescriptors};
  int threads = 1;
};

struct RepeatResult {
  int index = 0;
  std::uint64_t seed = 0;
  std::optional<int> group;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t feature_count = 0;
  double mae = 0.0;
  std::optional<double> spearman;  // nullopt when a side is constant or n < 2
  bool converged = true;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample std, n - 1; 0 for a single value
  std::size_t count = 0;
};

MetricSummary summarize(std::span<const double> values);

struct EvalReport {
  SplitMethod method = SplitMethod::kMsc;
  ModelKind model = ModelKind::kGradientBoosting;
  std::string blocks;
  std::vector<RepeatResult> results;  // in repeat-index order
  MetricSummary mae;
  MetricSummary spearman;  // over repeats where it is defined
  std::size_t undefined_spearman = 0;
  std::size_t nonconverged = 0;
  std::string config_json;  // embedded verbatim when non-empty
};

// Split for repeat `index` (the LOGO split list is indexed by group order).
DatasetSplit split_for_repeat(SplitMethod method, std::size_t n, const Groups *groups,
                              double test_fraction, std::uint64_t repeat_seed);

// Selection fitted on train rows only, then model fit and test scoring.
RepeatResult run_split(const FeatureMatrix &features, std::span<const double> targets,
                       const DatasetSplit &split, const EvalConfig &config,
                       std::uint64_t model_seed);

// Repeat i uses seed derive_seed(master, i): the split draws from
// SplitMix64(seed) and the model from derive_seed(seed, 1). Results are
// written to indexed slots, so any thread count gives the same report.
EvalReport repeated_eval(const FeatureMatrix &features, std::span<const double> targets,
                         const Groups *groups, const EvalConfig &config);

std::string report_to_json(const EvalReport &report);

// Rows = method/model, cells = "mean ± std"; LOGO reports add one line per group.
std::string reports_to_table(std::span<const EvalReport> reports);

} // namespace copas

#endif // COPAS_EVALUATION_H_
