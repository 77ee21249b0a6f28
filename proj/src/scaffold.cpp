// SPDX-License-Identifier: Apache-2.0

#include "copas/scaffold.h"

#include <algorithm>

#include "copas/csv.h"
#include "copas/error.h"

namespace copas {

std::vector<int> scaffold_atoms(const MolecularGraph &graph) {
  const std::size_t n = graph.atom_count();
  const auto &in_ring = graph.rings().ring_membership;
  std::vector<bool> alive(n, true);
  std::vector<int> degree(n);
  std::vector<int> stack;
  for (std::size_t i = 0; i < n; ++i) {
    degree[i] = static_cast<int>(graph.neighbors(static_cast<int>(i)).size());
    if (!in_ring[i] && degree[i] <= 1) stack.push_back(static_cast<int>(i));
  }
  // Peel non-ring atoms of degree <= 1 until only rings and linkers remain.
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (!alive[static_cast<std::size_t>(u)]) continue;
    alive[static_cast<std::size_t>(u)] = false;
    for (const Neighbor &nb : graph.neighbors(u)) {
      const auto v = static_cast<std::size_t>(nb.atom);
      if (alive[v] && --degree[v] <= 1 && !in_ring[v]) stack.push_back(nb.atom);
    }
  }
  std::vector<bool> keep = alive;
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    for (const Neighbor &nb : graph.neighbors(static_cast<int>(i))) {
      const BondOrder order = graph.bond(nb.bond).order;
      if (!alive[static_cast<std::size_t>(nb.atom)] &&
          (order == BondOrder::kDouble || order == BondOrder::kTriple)) {
        keep[static_cast<std::size_t>(nb.atom)] = true;
      }
    }
  }
  std::vector<int> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) atoms.push_back(static_cast<int>(i));
  }
  return atoms;
}

Scaffold extract_scaffold(const MolecularGraph &graph) {
  const auto atoms = scaffold_atoms(graph);
  if (atoms.empty()) return {};
  return {canonical_smiles(graph.subgraph(atoms))};
}

void ScaffoldRegistry::add(const std::string &scaffold_smiles, int group_id,
                           const std::string &group_name) {
  std::string canonical;
  if (!scaffold_smiles.empty()) {
    MolecularGraph g;
    try {
      g = parse_smiles(scaffold_smiles);
    } catch (const Error &e) {
      throw Error(ErrorCode::kUnparseableScaffold, "'" + scaffold_smiles + "': " + e.what());
    }
    canonical = canonical_smiles(g);
    if (extract_scaffold(g).canonical != canonical) {
      throw Error(ErrorCode::kNonFixedPointScaffold,
                  "'" + scaffold_smiles + "' is not its own Murcko scaffold");
    }
  }
  if (group_id < 1) {
    throw Error(ErrorCode::kFormatError, "group ids start at 1, got " + std::to_string(group_id));
  }
  if (auto it = entries_.find(canonical); it != entries_.end()) {
    throw Error(ErrorCode::kDuplicateScaffold,
                "'" + scaffold_smiles + "' already assigned to group " + std::to_string(it->second));
  }
  auto [it, inserted] = group_names_.emplace(group_id, group_name);
  if (!inserted && it->second != group_name && !group_name.empty()) {
    if (it->second.empty()) {
      it->second = group_name;
    } else {
      throw Error(ErrorCode::kFormatError, "group " + std::to_string(group_id) +
                                               " has two names: '" + it->second + "' and '" +
                                               group_name + "'");
    }
  }
  entries_.emplace(std::move(canonical), group_id);
}

void ScaffoldRegistry::validate_groups() const {
  int expected = 1;
  for (const auto &[id, name] : group_names_) {
    if (id != expected) {
      throw Error(ErrorCode::kFormatError,
                  "group ids must be contiguous from 1; missing " + std::to_string(expected));
    }
    ++expected;
  }
}

std::optional<int> ScaffoldRegistry::group_of(const std::string &canonical_scaffold) const {
  auto it = entries_.find(canonical_scaffold);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const std::string &ScaffoldRegistry::group_name(int group_id) const {
  static const std::string kEmpty;
  auto it = group_names_.find(group_id);
  return it == group_names_.end() ? kEmpty : it->second;
}

ScaffoldRegistry parse_registry(const std::string &csv_text) {
  const CsvTable table = parse_csv(csv_text);
  const std::size_t c_smiles = table.require_column("scaffold_smiles");
  const std::size_t c_group = table.require_column("group_id");
  const auto c_name = table.column("group_name");
  ScaffoldRegistry registry;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const double id = parse_double(row[c_group], "group_id");
    if (id != static_cast<int>(id)) {
      throw Error(ErrorCode::kFormatError, "non-integer group id on line " +
                                               std::to_string(table.line_numbers[r]));
    }
    registry.add(row[c_smiles], static_cast<int>(id), c_name ? row[*c_name] : std::string());
  }
  registry.validate_groups();
  return registry;
}

ScaffoldRegistry load_registry(const std::filesystem::path &path) {
  return parse_registry(read_text_file(path));
}

GateResult classify(const MolecularGraph &graph, const ScaffoldRegistry &registry) {
  GateResult result;
  result.scaffold = extract_scaffold(graph);
  result.group = registry.group_of(result.scaffold.canonical);
  return result;
}

std::map<int, std::vector<int>> group_dataset(const std::vector<MolecularGraph> &molecules,
                                              const ScaffoldRegistry &registry) {
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < molecules.size(); ++i) {
    const GateResult gate = classify(molecules[i], registry);
    if (!gate.known()) {
      throw Error(ErrorCode::kNovelScaffoldInDataset,
                  "molecule " + std::to_string(i) + " (" + molecules[i].source() +
                      ") has unregistered scaffold '" + gate.scaffold.canonical + "'");
    }
    groups[*gate.group].push_back(static_cast<int>(i));
  }
  return groups;
}

} // namespace copas
