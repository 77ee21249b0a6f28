// SPDX-License-Identifier: Apache-2.0

#include "copas/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "copas/error.h"
#include "copas/rng.h"

namespace copas {
namespace {

FeatureMatrix take_rows(const FeatureMatrix &m, std::span<const int> rows) {
  FeatureMatrix out;
  out.columns = m.columns;
  out.row_ids.reserve(rows.size());
  out.values.reserve(rows.size());
  for (int r : rows) {
    out.row_ids.push_back(m.row_ids[r]);
    out.values.push_back(m.values[r]);
  }
  return out;
}

void require_groups(const Groups &groups) {
  for (const auto &[id, members] : groups) {
    if (members.empty()) throw Error(ErrorCode::kEmptyGroup, "group " + std::to_string(id) + " is empty");
  }
}

std::vector<int> complement(std::size_t n, const std::vector<int> &sorted_test) {
  std::vector<int> train;
  train.reserve(n - sorted_test.size());
  std::size_t k = 0;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    if (k < sorted_test.size() && sorted_test[k] == i) {
      ++k;
    } else {
      train.push_back(i);
    }
  }
  return train;
}

std::size_t group_total(const Groups &groups) {
  std::size_t n = 0;
  for (const auto &[id, members] : groups) n += members.size();
  return n;
}

std::string mean_pm_std(const MetricSummary &s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f ± %.4f", s.mean, s.std);
  return buf;
}

} // namespace

std::string_view split_method_name(SplitMethod m) {
  switch (m) {
  case SplitMethod::kMsc: return "msc";
  case SplitMethod::kRandom: return "random";
  case SplitMethod::kLogo: return "logo";
  }
  return "?";
}

std::optional<SplitMethod> split_method_from_name(std::string_view name) {
  if (name == "msc") return SplitMethod::kMsc;
  if (name == "random") return SplitMethod::kRandom;
  if (name == "logo") return SplitMethod::kLogo;
  return std::nullopt;
}

std::size_t msc_test_size(const Groups &groups) {
  std::size_t k = 0;
  for (const auto &[id, members] : groups) k += members.size() <= 3 ? 1 : 2;
  return k;
}

DatasetSplit msc_split(const Groups &groups, std::uint64_t seed) {
  require_groups(groups);
  SplitMix64 rng(seed);
  DatasetSplit split;
  split.method = SplitMethod::kMsc;
  split.seed = seed;
  for (const auto &[id, members] : groups) {
    const std::size_t k = members.size() <= 3 ? 1 : 2;
    for (int i : rng.sample_without_replacement(members, k)) split.test.push_back(i);
  }
  std::sort(split.test.begin(), split.test.end());
  split.train = complement(group_total(groups), split.test);
  if (split.train.empty()) {
    throw Error(ErrorCode::kDegenerateSplit, "scaffold split leaves no training rows");
  }
  return split;
}

DatasetSplit random_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * test_fraction));
  if (n < 2 || k == 0 || k >= n) {
    throw Error(ErrorCode::kDegenerateSplit, "random split of " + std::to_string(n) +
                                                 " rows at fraction " + std::to_string(test_fraction));
  }
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  SplitMix64 rng(seed);
  DatasetSplit split;
  split.method = SplitMethod::kRandom;
  split.seed = seed;
  split.test = rng.sample_without_replacement(std::move(all), k);
  std::sort(split.test.begin(), split.test.end());
  split.train = complement(n, split.test);
  return split;
}

std::vector<DatasetSplit> logo_splits(const Groups &groups) {
  require_groups(groups);
  if (groups.size() < 2) throw Error(ErrorCode::kSingleGroup, "leave-one-group-out needs >= 2 groups");
  const std::size_t n = group_total(groups);
  std::vector<DatasetSplit> splits;
  for (const auto &[id, members] : groups) {
    DatasetSplit s;
    s.method = SplitMethod::kLogo;
    s.group = id;
    s.test = members;
    std::sort(s.test.begin(), s.test.end());
    s.train = complement(n, s.test);
    splits.push_back(std::move(s));
  }
  return splits;
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(pred.size()) + " vs " + std::to_string(truth.size()));
  }
  if (pred.empty()) throw Error(ErrorCode::kEmpty, "mae of empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(pred.size()) + " vs " + std::to_string(truth.size()));
  }
  const auto rp = average_ranks(pred);
  const auto rt = average_ranks(truth);
  return pearson(rp, rt);
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() >= 2) s.std = sample_std(values);
  return s;
}

DatasetSplit split_for_repeat(SplitMethod method, std::size_t n, const Groups *groups,
                              double test_fraction, std::uint64_t repeat_seed) {
  switch (method) {
  case SplitMethod::kMsc:
    if (groups == nullptr) throw Error(ErrorCode::kUsage, "scaffold split needs groups");
    return msc_split(*groups, repeat_seed);
  case SplitMethod::kRandom:
    return random_split(n, test_fraction, repeat_seed);
  case SplitMethod::kLogo:
    break;
  }
  throw Error(ErrorCode::kUsage, "leave-one-group-out splits are enumerated, not drawn");
}

RepeatResult run_split(const FeatureMatrix &features, std::span<const double> targets,
                       const DatasetSplit &split, const EvalConfig &config,
                       std::uint64_t model_seed) {
  const FeatureMatrix train = take_rows(features, split.train);
  const FeatureMatrix test = take_rows(features, split.test);
  const SelectionPipeline pipeline =
      SelectionPipeline::fit(train, config.thresholds, config.selection_scope);
  const FeatureMatrix train_x = pipeline.apply(train);
  const FeatureMatrix test_x = pipeline.apply(test);

  std::vector<double> train_y, test_y;
  for (int i : split.train) train_y.push_back(targets[i]);
  for (int i : split.test) test_y.push_back(targets[i]);

  TrainConfig tc = config.model;
  tc.seed = model_seed;
  const Model model = fit_model(train_x.values, train_y, tc);
  const std::vector<double> pred = predict(model, test_x.values);

  RepeatResult r;
  r.seed = split.seed;
  r.group = split.group;
  r.train_size = split.train.size();
  r.test_size = split.test.size();
  r.feature_count = train_x.cols();
  r.mae = mae(pred, test_y);
  if (pred.size() >= 2) {
    try {
      r.spearman = spearman(pred, test_y);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kConstantVector) throw;
    }
  }
  if (const auto *svr = std::get_if<SVRModel>(&model)) r.converged = svr->converged;
  return r;
}

EvalReport repeated_eval(const FeatureMatrix &features, std::span<const double> targets,
                         const Groups *groups, const EvalConfig &config) {
  if (features.rows() != targets.size()) {
    throw Error(ErrorCode::kLengthMismatch, "feature rows and targets differ in length");
  }
  std::vector<DatasetSplit> logo;
  std::size_t jobs = 0;
  if (config.method == SplitMethod::kLogo) {
    if (groups == nullptr) throw Error(ErrorCode::kUsage, "leave-one-group-out needs groups");
    logo = logo_splits(*groups);
    jobs = logo.size();
  } else {
    if (config.repeats < 1) throw Error(ErrorCode::kInvalidConfig, "repeats must be >= 1");
    jobs = static_cast<std::size_t>(config.repeats);
  }

  std::vector<RepeatResult> slots(jobs);
  std::vector<std::exception_ptr> failures(jobs);
  auto run = [&](std::size_t i) {
    try {
      const std::uint64_t seed = derive_seed(config.master_seed, i);
      DatasetSplit split = config.method == SplitMethod::kLogo
                               ? logo[i]
                               : split_for_repeat(config.method, targets.size(), groups,
                                                  config.test_fraction, seed);
      split.seed = seed;
      slots[i] = run_split(features, targets, split, config, derive_seed(seed, 1));
      slots[i].index = static_cast<int>(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(jobs, static_cast<std::size_t>(std::max(1, config.threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs; i = next++) run(i);
      });
    }
    for (auto &t : pool) t.join();
  }
  for (const auto &f : failures) {
    if (f) std::rethrow_exception(f);
  }

  EvalReport report;
  report.method = config.method;
  report.model = config.model.kind;
  report.results = std::move(slots);
  std::vector<double> maes, rhos;
  for (const auto &r : report.results) {
    maes.push_back(r.mae);
    if (r.spearman) {
      rhos.push_back(*r.spearman);
    } else {
      ++report.undefined_spearman;
    }
    if (!r.converged) ++report.nonconverged;
  }
  report.mae = summarize(maes);
  report.spearman = summarize(rhos);
  return report;
}

std::string report_to_json(const EvalReport &report) {
  using Json = nlohmann::ordered_json;
  Json j;
  j["format_version"] = 1;
  if (!report.config_json.empty()) j["config"] = Json::parse(report.config_json);
  j["method"] = split_method_name(report.method);
  j["model"] = model_kind_name(report.model);
  j["blocks"] = report.blocks;
  j["repeats"] = report.results.size();
  j["mae"] = {{"mean", report.mae.mean}, {"std", report.mae.std}, {"count", report.mae.count}};
  j["spearman"] = {{"mean", report.spearman.mean},
                   {"std", report.spearman.std},
                   {"count", report.spearman.count},
                   {"undefined", report.undefined_spearman}};
  j["nonconverged"] = report.nonconverged;
  Json rows = Json::array();
  for (const auto &r : report.results) {
    Json row;
    row["index"] = r.index;
    row["seed"] = r.seed;
    if (r.group) row["group"] = *r.group;
    row["train_size"] = r.train_size;
    row["test_size"] = r.test_size;
    row["features"] = r.feature_count;
    row["mae"] = r.mae;
    row["spearman"] = r.spearman ? Json(*r.spearman) : Json(nullptr);
    if (!r.converged) row["converged"] = false;
    rows.push_back(std::move(row));
  }
  j["results"] = std::move(rows);
  return j.dump(1) + "\n";
}

std::string reports_to_table(std::span<const EvalReport> reports) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s %-6s %-8s %8s  %-18s %-18s\n", "method", "model",
                "blocks", "repeats", "MAE", "Spearman");
  out += line;
  for (const auto &r : reports) {
    std::string method(split_method_name(r.method));
    std::transform(method.begin(), method.end(), method.begin(), ::toupper);
    std::string model(model_kind_name(r.model));
    std::transform(model.begin(), model.end(), model.begin(), ::toupper);
    std::snprintf(line, sizeof(line), "%-8s %-6s %-8s %8zu  %-18s %-18s\n", method.c_str(),
                  model.c_str(), r.blocks.c_str(), r.results.size(), mean_pm_std(r.mae).c_str(),
                  r.spearman.count > 0 ? mean_pm_std(r.spearman).c_str() : "n/a");
    out += line;
    if (r.method != SplitMethod::kLogo) continue;
    for (const auto &res : r.results) {
      char rho[32] = "n/a";
      if (res.spearman) std::snprintf(rho, sizeof(rho), "%.4f", *res.spearman);
      std::snprintf(line, sizeof(line), "  group %-3d n_test=%-4zu MAE=%.4f Spearman=%s\n",
                    res.group.value_or(-1), res.test_size, res.mae, rho);
      out += line;
    }
  }
  return out;
}

} // namespace copas
