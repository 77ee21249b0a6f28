// SPDX-License-Identifier: Apache-2.0

#include "copas/predictor.h"

#include <json.hpp>

#include "copas/error.h"

namespace copas {

FeatureMatrix Predictor::featurize(const std::vector<MolecularGraph> &molecules,
                                   const LatentTable *latents) const {
  FeatureSources sources;
  sources.keyset = keyset ? &*keyset : nullptr;
  sources.latents = latents;
  return assemble(molecules, blocks, sources);
}

std::vector<double> Predictor::predict(const FeatureMatrix &raw) const {
  const FeatureMatrix x = pipeline.apply(raw);
  if (x.rows() == 0) return {};
  return copas::predict(model, x.values);
}

Predictor train_predictor(const FeatureMatrix &raw, std::span<const double> targets,
                          const std::set<Block> &blocks, const std::optional<KeySet> &keyset,
                          const SelectionThresholds &thresholds,
                          const std::set<Block> &selection_scope, const TrainConfig &config) {
  Predictor p;
  p.blocks = blocks;
  p.keyset = keyset;
  p.pipeline = SelectionPipeline::fit(raw, thresholds, selection_scope);
  const FeatureMatrix x = p.pipeline.apply(raw);
  p.model = fit_model(x.values, targets, config);
  return p;
}

std::string predictor_to_json(const Predictor &p, const std::string &config_json) {
  using Json = nlohmann::ordered_json;
  Json j;
  j["format_version"] = 1;
  if (!config_json.empty()) j["config"] = Json::parse(config_json);
  j["blocks"] = blocks_to_string(p.blocks);
  j["keyset"] = p.keyset ? Json::parse(keyset_to_json(*p.keyset)) : Json(nullptr);
  j["pipeline"] = Json::parse(p.pipeline.to_json());
  j["model"] = Json::parse(model_to_json(p.model));
  return j.dump(1) + "\n";
}

Predictor predictor_from_json(const std::string &text) {
  using Json = nlohmann::json;
  Predictor p;
  try {
    const Json j = Json::parse(text);
    if (j.at("format_version").get<int>() != 1) {
      throw Error(ErrorCode::kInvalidModel, "unsupported predictor format_version");
    }
    p.blocks = parse_blocks(j.at("blocks").get<std::string>());
    if (!j.at("keyset").is_null()) p.keyset = parse_keyset_json(j.at("keyset").dump());
    p.pipeline = SelectionPipeline::from_json(j.at("pipeline").dump());
    p.model = model_from_json(j.at("model").dump());
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidModel, std::string("predictor JSON: ") + e.what());
  }
  if (model_width(p.model) != p.pipeline.kept_columns().size()) {
    throw Error(ErrorCode::kWidthMismatch, "model width differs from selected feature count");
  }
  return p;
}

} // namespace copas
