// SPDX-License-Identifier: Apache-2.0
//
// Regression learners trained from scratch: CART trees, gradient boosting,
// random forests and epsilon-SVR.

#ifndef COPAS_MODELS_H_
#define COPAS_MODELS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace copas {

using Rows = std::vector<std::vector<double>>;

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  double value = 0.0;      // leaf prediction (mean target at the node)
  int left = -1;
  int right = -1;
};

class RegressionTree {
public:
  double predict(std::span<const double> row) const;
  int depth() const;
  const std::vector<TreeNode> &nodes() const { return nodes_; }
  std::vector<TreeNode> &mutable_nodes() { return nodes_; }

  friend bool operator==(const RegressionTree &, const RegressionTree &) = default;

private:
  std::vector<TreeNode> nodes_;
};

inline bool operator==(const TreeNode &a, const TreeNode &b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.value == b.value &&
         a.left == b.left && a.right == b.right;
}

struct TreeParams {
  int max_depth = 4;
  int min_samples_leaf = 1;
  // Features drawn per node; nullopt or >= width means all features.
  std::optional<int> max_features;
};

// Greedy CART minimizing the children's summed squared error over midpoints
// of consecutive distinct values. Ties go to the smallest feature index, then
// the smallest threshold.
RegressionTree fit_tree(const Rows &x, std::span<const double> y, const TreeParams &params,
                        std::uint64_t seed = 0);

// Same, on a multiset of row indices (bootstrap samples may repeat rows).
RegressionTree fit_tree_on(const Rows &x, std::span<const double> y,
                           std::span<const int> sample, const TreeParams &params,
                           std::uint64_t seed);

enum class ModelKind { kGradientBoosting, kRandomForest, kSvr };
enum class KernelKind { kRbf, kLinear };

std::string_view model_kind_name(ModelKind kind);
std::optional<ModelKind> model_kind_from_name(std::string_view name);

struct TrainConfig {
  ModelKind kind = ModelKind::kGradientBoosting;
  std::uint64_t seed = 0;
  // trees
  int n_estimators = 35;
  int max_depth = 4;
  int min_samples_leaf = 1;
  double learning_rate = 0.1;   // GB only
  bool bootstrap = true;        // RF only
  std::optional<int> max_features;  // RF default: ceil(p / 3)
  // SVR
  double c = 500.0;
  double epsilon = 0.75;
  KernelKind kernel = KernelKind::kRbf;
  std::optional<double> gamma;  // default 1 / (p * mean feature variance)
  double tolerance = 1e-3;
  long max_iterations = 100000;

  // Published hyperparameters: GB 35 trees depth 4; RF 55 trees depth 10;
  // SVR C = 500, epsilon = 0.75.
  static TrainConfig defaults(ModelKind kind);
};

struct GBModel {
  std::size_t width = 0;
  double init_value = 0.0;
  double learning_rate = 0.1;
  int max_depth = 4;
  int min_samples_leaf = 1;
  std::vector<RegressionTree> trees;
  // Training MSE before any tree and after each stage.
  std::vector<double> training_loss;

  friend bool operator==(const GBModel &, const GBModel &) = default;
};

struct RFModel {
  std::size_t width = 0;
  int max_depth = 10;
  int min_samples_leaf = 1;
  bool bootstrap = true;
  int max_features = 0;
  std::vector<std::uint64_t> tree_seeds;
  std::vector<RegressionTree> trees;

  friend bool operator==(const RFModel &, const RFModel &) = default;
};

struct SVRModel {
  std::size_t width = 0;
  KernelKind kernel = KernelKind::kRbf;
  double gamma = 1.0;
  double c = 500.0;
  double epsilon = 0.75;
  double bias = 0.0;
  Rows support_vectors;
  std::vector<double> dual_coef;  // alpha_i - alpha_i*, in [-C, C]
  bool converged = true;
  long iterations = 0;
  double max_violation = 0.0;

  double kernel_value(std::span<const double> a, std::span<const double> b) const;

  friend bool operator==(const SVRModel &, const SVRModel &) = default;
};

using Model = std::variant<GBModel, RFModel, SVRModel>;

GBModel fit_gb(const Rows &x, std::span<const double> y, const TrainConfig &config);
RFModel fit_rf(const Rows &x, std::span<const double> y, const TrainConfig &config);
SVRModel fit_svr(const Rows &x, std::span<const double> y, const TrainConfig &config);
Model fit_model(const Rows &x, std::span<const double> y, const TrainConfig &config);

double predict_row(const Model &model, std::span<const double> row);
std::vector<double> predict(const Model &model, const Rows &x);
std::size_t model_width(const Model &model);
ModelKind model_kind(const Model &model);

std::string model_to_json(const Model &model);
Model model_from_json(const std::string &text);

} // namespace copas

#endif // COPAS_MODELS_H_
