// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include "copas/error.h"
#include "copas/models.h"
#include "copas/rng.h"
#include "models/common.h"

namespace copas {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

class TreeBuilder {
public:
  TreeBuilder(const Rows &x, std::span<const double> y, const TreeParams &params,
              std::uint64_t seed)
      : x_(x), y_(y), params_(params), rng_(seed), width_(x.empty() ? 0 : x[0].size()) {}

  RegressionTree build(std::vector<int> sample) {
    RegressionTree tree;
    grow(tree.mutable_nodes(), std::move(sample), 0);
    return tree;
  }

private:
  int grow(std::vector<TreeNode> &nodes, std::vector<int> sample, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    double sum = 0.0;
    for (int i : sample) sum += y_[i];
    const double mean = sum / static_cast<double>(sample.size());
    nodes[id].value = mean;

    const std::size_t n = sample.size();
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, params_.min_samples_leaf));
    if (depth >= params_.max_depth || n < 2 * min_leaf || is_pure(sample)) return id;

    const Split best = find_split(sample, mean, min_leaf);
    if (best.feature < 0) return id;

    std::vector<int> left, right;
    for (int i : sample) {
      (x_[i][best.feature] <= best.threshold ? left : right).push_back(i);
    }
    nodes[id].feature = best.feature;
    nodes[id].threshold = best.threshold;
    const int l = grow(nodes, std::move(left), depth + 1);
    const int r = grow(nodes, std::move(right), depth + 1);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }

  bool is_pure(const std::vector<int> &sample) const {
    for (int i : sample) {
      if (y_[i] != y_[sample.front()]) return false;
    }
    return true;
  }

  std::vector<int> candidate_features() {
    std::vector<int> all(width_);
    std::iota(all.begin(), all.end(), 0);
    if (!params_.max_features || *params_.max_features >= static_cast<int>(width_)) return all;
    auto drawn = rng_.sample_without_replacement(std::move(all),
                                                 static_cast<std::size_t>(std::max(1, *params_.max_features)));
    std::sort(drawn.begin(), drawn.end());
    return drawn;
  }

  Split find_split(const std::vector<int> &sample, double mean, std::size_t min_leaf) {
    const std::size_t n = sample.size();
    Split best;
    double best_sse = INFINITY;
    std::vector<std::pair<double, double>> col(n);  // (x, centered y)
    for (int f : candidate_features()) {
      for (std::size_t k = 0; k < n; ++k) col[k] = {x_[sample[k]][f], y_[sample[k]] - mean};
      std::sort(col.begin(), col.end(),
                [](const auto &a, const auto &b) { return a.first < b.first; });
      double total = 0.0, total_sq = 0.0;
      for (const auto &[xv, yv] : col) {
        total += yv;
        total_sq += yv * yv;
      }
      double left = 0.0, left_sq = 0.0;
      for (std::size_t k = 1; k < n; ++k) {
        left += col[k - 1].second;
        left_sq += col[k - 1].second * col[k - 1].second;
        if (!(col[k - 1].first < col[k].first)) continue;
        if (k < min_leaf || n - k < min_leaf) continue;
        const double nl = static_cast<double>(k);
        const double nr = static_cast<double>(n - k);
        const double right = total - left;
        const double right_sq = total_sq - left_sq;
        const double sse = (left_sq - left * left / nl) + (right_sq - right * right / nr);
        // Strict improvement beyond rounding keeps the earliest candidate on ties.
        if (best.feature < 0 || sse < best_sse - 1e-12 * std::max(1.0, std::abs(best_sse))) {
          best_sse = sse;
          best.feature = f;
          best.threshold = col[k - 1].first + (col[k].first - col[k - 1].first) / 2.0;
          best.sse = sse;
        }
      }
    }
    return best;
  }

  const Rows &x_;
  std::span<const double> y_;
  TreeParams params_;
  SplitMix64 rng_;
  std::size_t width_;
};

} // namespace

namespace internal {

void check_training_set(const Rows &x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training rows");
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.size()) + " rows vs " + std::to_string(y.size()) + " targets");
  }
  const std::size_t p = x[0].size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != p) throw Error(ErrorCode::kWidthMismatch, "ragged feature rows");
    for (double v : x[i]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteTarget, "non-finite feature value");
    }
    if (!std::isfinite(y[i])) {
      throw Error(ErrorCode::kNonFiniteTarget, "target " + std::to_string(i) + " is not finite");
    }
  }
}

} // namespace internal

double RegressionTree::predict(std::span<const double> row) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    id = row[nodes_[id].feature] <= nodes_[id].threshold ? nodes_[id].left : nodes_[id].right;
  }
  return nodes_[id].value;
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[id].feature >= 0) {
      stack.push_back({nodes_[id].left, d + 1});
      stack.push_back({nodes_[id].right, d + 1});
    }
  }
  return deepest;
}

RegressionTree fit_tree_on(const Rows &x, std::span<const double> y, std::span<const int> sample,
                           const TreeParams &params, std::uint64_t seed) {
  internal::check_training_set(x, y);
  if (sample.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "empty sample");
  TreeBuilder builder(x, y, params, seed);
  return builder.build(std::vector<int>(sample.begin(), sample.end()));
}

RegressionTree fit_tree(const Rows &x, std::span<const double> y, const TreeParams &params,
                        std::uint64_t seed) {
  std::vector<int> all(x.size());
  std::iota(all.begin(), all.end(), 0);
  return fit_tree_on(x, y, all, params, seed);
}

} // namespace copas
