// SPDX-License-Identifier: Apache-2.0
//
// A trained model bundled with everything needed to score new molecules:
// feature blocks, optional custom key set, and the fitted selection pipeline.

#ifndef COPAS_PREDICTOR_H_
#define COPAS_PREDICTOR_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "copas/features.h"
#include "copas/models.h"
#include "copas/molgraph.h"
#include "copas/selection.h"

namespace copas {

struct Predictor {
  std::set<Block> blocks;
  std::optional<KeySet> keyset;  // nullopt: built-in key set
  SelectionPipeline pipeline;
  Model model;

  // Raw features assembled with this predictor's blocks and key set.
  FeatureMatrix featurize(const std::vector<MolecularGraph> &molecules,
                          const LatentTable *latents) const;
  std::vector<double> predict(const FeatureMatrix &raw) const;
};

Predictor train_predictor(const FeatureMatrix &raw, std::span<const double> targets,
                          const std::set<Block> &blocks, const std::optional<KeySet> &keyset,
                          const SelectionThresholds &thresholds,
                          const std::set<Block> &selection_scope, const TrainConfig &config);

// `config_json`, when non-empty, is embedded verbatim under "config".
std::string predictor_to_json(const Predictor &p, const std::string &config_json = "");
Predictor predictor_from_json(const std::string &text);

} // namespace copas

#endif // COPAS_PREDICTOR_H_
