// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include "copas/error.h"
#include "copas/models.h"

namespace copas {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

Json node_to_json(const std::vector<TreeNode> &nodes, int id) {
  const TreeNode &n = nodes[id];
  if (n.feature < 0) return Json{{"value", n.value}};
  return Json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"value", n.value},
              {"left", node_to_json(nodes, n.left)},
              {"right", node_to_json(nodes, n.right)}};
}

int node_from_json(const Json &j, std::vector<TreeNode> &nodes, int depth) {
  if (depth > 64) throw Error(ErrorCode::kInvalidModel, "tree nesting too deep");
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  nodes[id].value = j.at("value").get<double>();
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    if (feature < 0) throw Error(ErrorCode::kInvalidModel, "negative split feature");
    nodes[id].feature = feature;
    nodes[id].threshold = j.at("threshold").get<double>();
    const int l = node_from_json(j.at("left"), nodes, depth + 1);
    const int r = node_from_json(j.at("right"), nodes, depth + 1);
    nodes[id].left = l;
    nodes[id].right = r;
  }
  return id;
}

Json tree_to_json(const RegressionTree &t) { return node_to_json(t.nodes(), 0); }

RegressionTree tree_from_json(const Json &j, std::size_t width) {
  RegressionTree t;
  node_from_json(j, t.mutable_nodes(), 0);
  for (const TreeNode &n : t.nodes()) {
    if (n.feature >= static_cast<int>(width)) {
      throw Error(ErrorCode::kInvalidModel, "split feature outside model width");
    }
  }
  return t;
}

Json to_json(const GBModel &m) {
  Json trees = Json::array();
  for (const auto &t : m.trees) trees.push_back(tree_to_json(t));
  return Json{{"format_version", kFormatVersion},
              {"kind", "gb"},
              {"width", m.width},
              {"init_value", m.init_value},
              {"learning_rate", m.learning_rate},
              {"n_estimators", m.trees.size()},
              {"max_depth", m.max_depth},
              {"min_samples_leaf", m.min_samples_leaf},
              {"training_loss", m.training_loss},
              {"trees", trees}};
}

Json to_json(const RFModel &m) {
  Json trees = Json::array();
  for (const auto &t : m.trees) trees.push_back(tree_to_json(t));
  return Json{{"format_version", kFormatVersion},
              {"kind", "rf"},
              {"width", m.width},
              {"n_estimators", m.trees.size()},
              {"max_depth", m.max_depth},
              {"min_samples_leaf", m.min_samples_leaf},
              {"bootstrap", m.bootstrap},
              {"max_features", m.max_features},
              {"tree_seeds", m.tree_seeds},
              {"trees", trees}};
}

Json to_json(const SVRModel &m) {
  return Json{{"format_version", kFormatVersion},
              {"kind", "svr"},
              {"width", m.width},
              {"kernel", m.kernel == KernelKind::kRbf ? "rbf" : "linear"},
              {"gamma", m.gamma},
              {"c", m.c},
              {"epsilon", m.epsilon},
              {"bias", m.bias},
              {"converged", m.converged},
              {"iterations", m.iterations},
              {"max_violation", m.max_violation},
              {"dual_coef", m.dual_coef},
              {"support_vectors", m.support_vectors}};
}

Model from_json(const Json &j) {
  const int version = j.at("format_version").get<int>();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kInvalidModel, "unsupported model format_version " + std::to_string(version));
  }
  const std::string kind = j.at("kind").get<std::string>();
  const std::size_t width = j.at("width").get<std::size_t>();
  if (kind == "gb") {
    GBModel m;
    m.width = width;
    m.init_value = j.at("init_value").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.max_depth = j.at("max_depth").get<int>();
    m.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    m.training_loss = j.at("training_loss").get<std::vector<double>>();
    for (const auto &t : j.at("trees")) m.trees.push_back(tree_from_json(t, width));
    return m;
  }
  if (kind == "rf") {
    RFModel m;
    m.width = width;
    m.max_depth = j.at("max_depth").get<int>();
    m.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    m.bootstrap = j.at("bootstrap").get<bool>();
    m.max_features = j.at("max_features").get<int>();
    m.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto &t : j.at("trees")) m.trees.push_back(tree_from_json(t, width));
    return m;
  }
  if (kind == "svr") {
    SVRModel m;
    m.width = width;
    const std::string kernel = j.at("kernel").get<std::string>();
    if (kernel == "rbf") {
      m.kernel = KernelKind::kRbf;
    } else if (kernel == "linear") {
      m.kernel = KernelKind::kLinear;
    } else {
      throw Error(ErrorCode::kInvalidModel, "unknown kernel '" + kernel + "'");
    }
    m.gamma = j.at("gamma").get<double>();
    m.c = j.at("c").get<double>();
    m.epsilon = j.at("epsilon").get<double>();
    m.bias = j.at("bias").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<long>();
    m.max_violation = j.at("max_violation").get<double>();
    m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<Rows>();
    if (m.dual_coef.size() != m.support_vectors.size()) {
      throw Error(ErrorCode::kInvalidModel, "dual coefficient count differs from support vectors");
    }
    for (const auto &sv : m.support_vectors) {
      if (sv.size() != width) throw Error(ErrorCode::kInvalidModel, "support vector width mismatch");
    }
    return m;
  }
  throw Error(ErrorCode::kInvalidModel, "unknown model kind '" + kind + "'");
}

} // namespace

std::string model_to_json(const Model &model) {
  return std::visit([](const auto &m) { return to_json(m).dump(1); }, model);
}

Model model_from_json(const std::string &text) {
  try {
    return from_json(Json::parse(text));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidModel, std::string("model JSON: ") + e.what());
  }
}

} // namespace copas
