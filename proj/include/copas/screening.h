// SPDX-License-Identifier: Apache-2.0
//
// Five-tier candidate funnel: element vocabulary, known scaffold, top
// predicted fraction, property thresholds, CAS availability.

#ifndef COPAS_SCREENING_H_
#define COPAS_SCREENING_H_

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "copas/element.h"
#include "copas/features.h"
#include "copas/molgraph.h"
#include "copas/predictor.h"
#include "copas/scaffold.h"

namespace copas {

struct Candidate {
  std::string id;         // canonical SMILES, or the raw text when unparseable
  std::string smiles;     // first input spelling, by lexicographic order
  std::optional<MolecularGraph> graph;
  std::string parse_error;
  std::optional<std::string> cas;  // from the pool file
  // Filled in by later tiers.
  std::optional<int> group;
  std::string group_name;
  std::optional<double> predicted;
  std::optional<double> donor_number;
  std::optional<double> dipole_moment;
  std::optional<int> hba;
};

struct CandidatePool {
  std::string label;
  std::size_t input_rows = 0;
  std::size_t merged_duplicates = 0;
  std::vector<Candidate> records;  // sorted by id, ids unique
};

// CSV `smiles[,cas]`. Canonical duplicates are merged; the smallest non-empty
// CAS wins so the result does not depend on row order.
CandidatePool parse_pool(std::string_view csv_text, std::string label = "pool");
CandidatePool load_pool(const std::filesystem::path &path);

struct PropertyRecord {
  std::optional<double> donor_number;   // kcal/mol
  std::optional<double> dipole_moment;  // Debye
  std::optional<int> hba;
};

// CSV `smiles,donor_number,dipole_moment[,hba]`; blank cells are missing.
std::map<std::string, PropertyRecord> parse_property_table(std::string_view csv_text);
std::map<std::string, PropertyRecord> load_property_table(const std::filesystem::path &path);

// CSV `smiles,cas`, keyed by canonical SMILES.
std::map<std::string, std::string> parse_cas_table(std::string_view csv_text);
std::map<std::string, std::string> load_cas_table(const std::filesystem::path &path);

struct PropertyThresholds {
  double dn_min = -INFINITY;
  double dm_min = -INFINITY;
  int ha_min = 0;
};

struct Drop {
  std::string id;
  std::string cause;
};

struct TierOutcome {
  std::vector<Candidate> survivors;
  std::vector<Drop> dropped;
};

// Count kept by a top-fraction cut: ceil(n * fraction), with products within
// 1e-9 of an integer treated as that integer.
std::size_t top_fraction_count(std::size_t n, double fraction);

// Empty vocabulary admits every supported element.
TierOutcome tier_vocab(std::vector<Candidate> pool, const std::set<Element> &vocabulary,
                       const LatentTable *latents = nullptr);
TierOutcome tier_scaffold(std::vector<Candidate> pool, const ScaffoldRegistry &registry);
// Survivors come back sorted by predicted value descending, then id.
TierOutcome tier_rank(std::vector<Candidate> pool, const Predictor &predictor,
                      const LatentTable *latents, double top_fraction, int threads = 1);
TierOutcome tier_properties(std::vector<Candidate> pool,
                            const std::map<std::string, PropertyRecord> &table,
                            const PropertyThresholds &thresholds);
TierOutcome tier_cas(std::vector<Candidate> pool, const std::map<std::string, std::string> &table);

struct FunnelConfig {
  std::set<Element> vocabulary;
  std::filesystem::path pool;
  std::filesystem::path registry;
  std::filesystem::path model;
  std::optional<std::filesystem::path> latents;
  std::optional<std::filesystem::path> properties;
  std::optional<std::filesystem::path> cas;
  double top_fraction = 0.01;
  PropertyThresholds thresholds;
  bool require_latent = false;  // tier 1 also requires a latent-table entry

  // Relative paths resolve against `base_dir`.
  static FunnelConfig from_json(const std::string &text, const std::filesystem::path &base_dir);
  // Paths are echoed as resolved, so the echo reruns from any directory.
  std::string to_json() const;
};

struct FunnelInputs {
  CandidatePool pool;
  ScaffoldRegistry registry;
  Predictor predictor;
  std::optional<LatentTable> latents;
  std::map<std::string, PropertyRecord> properties;
  std::optional<std::map<std::string, std::string>> cas;  // nullopt: use pool CAS column
};

// Loads every configured input, reporting all failures in one InvalidConfig error.
FunnelInputs load_funnel_inputs(const FunnelConfig &config);

struct TierReport {
  std::string name;
  std::size_t input = 0;
  std::vector<std::string> survivors;  // ids in tier output order
  std::map<std::string, std::size_t> drop_causes;
};

struct DroppedRecord {
  std::string id;
  std::string tier;
  std::string cause;
};

struct ScreeningReport {
  std::string pool_label;
  std::size_t input_rows = 0;
  std::size_t merged_duplicates = 0;
  std::size_t pool_size = 0;
  double top_fraction = 0.0;
  std::vector<TierReport> tiers;
  std::vector<DroppedRecord> dropped;  // sorted by id
  std::vector<Candidate> final;        // predicted descending, id ascending
  std::string config_json;
};

ScreeningReport run_funnel(const FunnelInputs &inputs, const FunnelConfig &config, int threads = 1);

std::string screening_report_to_json(const ScreeningReport &report);
std::string screening_report_to_text(const ScreeningReport &report, std::size_t top_n = 20);

} // namespace copas

#endif // COPAS_SCREENING_H_
