// SPDX-License-Identifier: Apache-2.0
//
// Bemis-Murcko scaffolds and the scaffold-group registry used to gate and
// stratify molecules.

#ifndef COPAS_SCAFFOLD_H_
#define COPAS_SCAFFOLD_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copas/molgraph.h"

namespace copas {

struct Scaffold {
  std::string canonical;  // empty for acyclic molecules

  bool empty() const { return canonical.empty(); }
  friend bool operator==(const Scaffold &, const Scaffold &) = default;
};

// Ring atoms, ring-to-ring linker atoms, and atoms joined to either by a
// double or triple bond. Returned as ascending atom indices.
std::vector<int> scaffold_atoms(const MolecularGraph &graph);

Scaffold extract_scaffold(const MolecularGraph &graph);

class ScaffoldRegistry {
public:
  ScaffoldRegistry() = default;

  // Adds an entry after validating it; the scaffold SMILES may be empty.
  void add(const std::string &scaffold_smiles, int group_id,
           const std::string &group_name);
  // Group ids must be contiguous from 1 once all rows are in.
  void validate_groups() const;

  std::optional<int> group_of(const std::string &canonical_scaffold) const;
  const std::string &group_name(int group_id) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t group_count() const { return group_names_.size(); }
  const std::map<std::string, int> &entries() const { return entries_; }
  const std::map<int, std::string> &group_names() const { return group_names_; }

private:
  std::map<std::string, int> entries_;
  std::map<int, std::string> group_names_;
};

// CSV with header `scaffold_smiles,group_id,group_name`.
ScaffoldRegistry load_registry(const std::filesystem::path &path);
ScaffoldRegistry parse_registry(const std::string &csv_text);

struct GateResult {
  std::optional<int> group;  // nullopt = novel scaffold
  Scaffold scaffold;

  bool known() const { return group.has_value(); }
};

GateResult classify(const MolecularGraph &graph, const ScaffoldRegistry &registry);

// Partitions molecule indices by scaffold group. Throws
// NovelScaffoldInDataset naming the first index with an unregistered scaffold.
std::map<int, std::vector<int>> group_dataset(
    const std::vector<MolecularGraph> &molecules, const ScaffoldRegistry &registry);

} // namespace copas

#endif // COPAS_SCAFFOLD_H_
