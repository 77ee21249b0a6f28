// SPDX-License-Identifier: Apache-2.0
//
// Feature blocks: structural keys (K), native descriptors (D) and ingested
// latent vectors (Z), assembled into a named, block-tagged matrix.

#ifndef COPAS_FEATURES_H_
#define COPAS_FEATURES_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "copas/molgraph.h"

namespace copas {

inline constexpr std::size_t kMaxPatternAtoms = 8;

struct PatternAtom {
  std::optional<Element> element;  // nullopt = any
  std::optional<bool> aromatic;    // nullopt = any
};

struct PatternBond {
  int a = 0;
  int b = 0;
  std::optional<BondOrder> order;  // nullopt = any
};

struct PatternKey {
  int id = 0;
  std::string name;
  std::vector<PatternAtom> atoms;
  std::vector<PatternBond> bonds;
  int min_count = 1;
};

struct KeySet {
  std::string name;
  std::vector<PatternKey> keys;

  std::size_t size() const { return keys.size(); }
};

// Number of distinct subgraph images of `pattern` in `graph` (embeddings
// modulo pattern automorphisms). Throws PatternTooLarge above 8 atoms and
// InvalidPattern for disconnected or malformed patterns.
int match_pattern(const MolecularGraph &graph, const PatternKey &pattern);

std::vector<std::uint8_t> fingerprint(const MolecularGraph &graph, const KeySet &keyset);

// The documented 64-key native set.
const KeySet &default_keyset();

KeySet parse_keyset_json(std::string_view json_text, std::string name = "custom");
KeySet load_keyset(const std::filesystem::path &path);
std::string keyset_to_json(const KeySet &keyset);

// --- descriptors -----------------------------------------------------------

inline constexpr std::size_t kDescriptorCount = 24;

const std::array<std::string_view, kDescriptorCount> &descriptor_names();

struct DescriptorVector {
  std::array<double, kDescriptorCount> values{};

  double operator[](std::string_view name) const;
};

DescriptorVector descriptors(const MolecularGraph &graph);

double molecular_weight(const MolecularGraph &graph);

// --- latent vectors ----------------------------------------------------------

struct LatentTable {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>> vectors;  // canonical SMILES key

  const std::vector<double> *find(const std::string &canonical) const;
  std::size_t size() const { return vectors.size(); }
};

// CSV `smiles,z1,...,zd`.
LatentTable parse_latents(std::string_view csv_text);
LatentTable load_latents(const std::filesystem::path &path);

// External precomputed fingerprints, CSV `smiles,bit0..bitN`, used in place
// of the native K block.
struct ExternalFingerprints {
  std::vector<std::string> bit_names;
  std::map<std::string, std::vector<double>> rows;  // canonical SMILES key
};

ExternalFingerprints parse_external_fingerprints(std::string_view csv_text);
ExternalFingerprints load_external_fingerprints(const std::filesystem::path &path);

// --- assembly ------------------------------------------------------------------

enum class Block : std::uint8_t { kKeys, kDescriptors, kLatent };

char block_tag(Block b);
std::optional<Block> block_from_tag(char c);

// Parses a block list such as "D", "K+D", "Z+D" or "KDZ".
std::set<Block> parse_blocks(std::string_view tags);
std::string blocks_to_string(const std::set<Block> &blocks);

struct FeatureColumn {
  std::string name;
  Block block;
};

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<FeatureColumn> columns;
  std::vector<std::vector<double>> values;  // row-major

  std::size_t rows() const { return values.size(); }
  std::size_t cols() const { return columns.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
};

struct FeatureSources {
  const KeySet *keyset = nullptr;                     // defaults to default_keyset()
  const ExternalFingerprints *external_keys = nullptr;  // replaces native K when set
  const LatentTable *latents = nullptr;
};

// Column order: K block, D block, Z block. Throws MissingLatent when Z is
// requested and a molecule has no vector.
FeatureMatrix assemble(const std::vector<MolecularGraph> &molecules,
                       const std::set<Block> &blocks, const FeatureSources &sources);

// Column names that assemble() would produce, without computing values.
std::vector<FeatureColumn> feature_columns(const std::set<Block> &blocks,
                                           const FeatureSources &sources);

std::string feature_matrix_to_csv(const FeatureMatrix &matrix);

} // namespace copas

#endif // COPAS_FEATURES_H_
