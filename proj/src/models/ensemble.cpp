// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include "copas/error.h"
#include "copas/models.h"
#include "copas/rng.h"
#include "models/common.h"

namespace copas {
namespace {

double mean_squared_error(std::span<const double> y, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - f[i]) * (y[i] - f[i]);
  return s / static_cast<double>(y.size());
}

template <class... Ts> struct Overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

namespace internal {

void check_width(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::kWidthMismatch, "model expects " + std::to_string(expected) +
                                               " features, got " + std::to_string(got));
  }
}

} // namespace internal

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
  case ModelKind::kGradientBoosting: return "gb";
  case ModelKind::kRandomForest: return "rf";
  case ModelKind::kSvr: return "svr";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_name(std::string_view name) {
  if (name == "gb") return ModelKind::kGradientBoosting;
  if (name == "rf") return ModelKind::kRandomForest;
  if (name == "svr") return ModelKind::kSvr;
  return std::nullopt;
}

TrainConfig TrainConfig::defaults(ModelKind kind) {
  TrainConfig c;
  c.kind = kind;
  if (kind == ModelKind::kRandomForest) {
    c.n_estimators = 55;
    c.max_depth = 10;
  }
  return c;
}

GBModel fit_gb(const Rows &x, std::span<const double> y, const TrainConfig &config) {
  internal::check_training_set(x, y);
  GBModel m;
  m.width = x[0].size();
  m.learning_rate = config.learning_rate;
  m.max_depth = config.max_depth;
  m.min_samples_leaf = config.min_samples_leaf;
  m.init_value = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

  std::vector<double> f(y.size(), m.init_value);
  std::vector<double> residual(y.size());
  m.training_loss.push_back(mean_squared_error(y, f));
  const TreeParams params{config.max_depth, config.min_samples_leaf, std::nullopt};
  for (int t = 0; t < config.n_estimators; ++t) {
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - f[i];
    RegressionTree tree = fit_tree(x, residual, params, derive_seed(config.seed, t));
    for (std::size_t i = 0; i < y.size(); ++i) f[i] += m.learning_rate * tree.predict(x[i]);
    m.trees.push_back(std::move(tree));
    m.training_loss.push_back(mean_squared_error(y, f));
  }
  return m;
}

RFModel fit_rf(const Rows &x, std::span<const double> y, const TrainConfig &config) {
  internal::check_training_set(x, y);
  RFModel m;
  m.width = x[0].size();
  m.max_depth = config.max_depth;
  m.min_samples_leaf = config.min_samples_leaf;
  m.bootstrap = config.bootstrap;
  m.max_features = config.max_features.value_or(
      std::max(1, static_cast<int>((m.width + 2) / 3)));
  const TreeParams params{config.max_depth, config.min_samples_leaf, m.max_features};
  const std::size_t n = y.size();
  for (int t = 0; t < config.n_estimators; ++t) {
    const std::uint64_t seed = derive_seed(config.seed, t);
    SplitMix64 rng(seed);
    std::vector<int> sample(n);
    if (m.bootstrap) {
      for (auto &s : sample) s = static_cast<int>(rng.uniform_index(n));
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    m.tree_seeds.push_back(seed);
    m.trees.push_back(fit_tree_on(x, y, sample, params, rng.next()));
  }
  return m;
}

Model fit_model(const Rows &x, std::span<const double> y, const TrainConfig &config) {
  switch (config.kind) {
  case ModelKind::kGradientBoosting: return fit_gb(x, y, config);
  case ModelKind::kRandomForest: return fit_rf(x, y, config);
  case ModelKind::kSvr: return fit_svr(x, y, config);
  }
  throw Error(ErrorCode::kInvalidModel, "unknown model kind");
}

std::size_t model_width(const Model &model) {
  return std::visit([](const auto &m) { return m.width; }, model);
}

ModelKind model_kind(const Model &model) {
  return std::visit(Overloaded{
                        [](const GBModel &) { return ModelKind::kGradientBoosting; },
                        [](const RFModel &) { return ModelKind::kRandomForest; },
                        [](const SVRModel &) { return ModelKind::kSvr; },
                    },
                    model);
}

double predict_row(const Model &model, std::span<const double> row) {
  internal::check_width(model_width(model), row.size());
  return std::visit(
      Overloaded{
          [&](const GBModel &m) {
            double s = 0.0;
            for (const auto &t : m.trees) s += t.predict(row);
            return m.init_value + m.learning_rate * s;
          },
          [&](const RFModel &m) {
            if (m.trees.empty()) return 0.0;
            double s = 0.0;
            for (const auto &t : m.trees) s += t.predict(row);
            return s / static_cast<double>(m.trees.size());
          },
          [&](const SVRModel &m) {
            double s = m.bias;
            for (std::size_t k = 0; k < m.support_vectors.size(); ++k) {
              s += m.dual_coef[k] * m.kernel_value(m.support_vectors[k], row);
            }
            return s;
          },
      },
      model);
}

std::vector<double> predict(const Model &model, const Rows &x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto &row : x) out.push_back(predict_row(model, row));
  return out;
}

} // namespace copas
