// SPDX-License-Identifier: Apache-2.0
//
// SMILES parsing, ring perception and canonical SMILES output.

#ifndef COPAS_MOLGRAPH_H_
#define COPAS_MOLGRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copas/element.h"

namespace copas {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Contribution of a bond to an atom's valence. Aromatic bonds count 1; the
// extra aromatic electron is handled per atom (see implicit_hydrogens()).
int bond_valence(BondOrder order);

struct Atom {
  Element element = Element::kC;
  bool aromatic = false;
  int formal_charge = 0;
  int explicit_h = 0;  // only meaningful for bracket atoms
  int isotope = 0;     // parsed, ignored downstream
  bool bracket = false;
  int degree = 0;  // heavy-neighbor count, filled in by MolecularGraph
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

struct RingInfo {
  // Smallest set of smallest rings. Each ring lists atoms in cycle order,
  // starting from its smallest atom index.
  std::vector<std::vector<int>> rings;
  std::vector<bool> ring_membership;  // per atom
  std::vector<bool> ring_bond;        // per bond
};

class MolecularGraph {
public:
  MolecularGraph() = default;

  // Validates the structure (simple graph, aromatic consistency, valences)
  // and perceives rings. Throws Error on failure; `bad_atom`, when non-null,
  // receives the index of the offending atom.
  static MolecularGraph build(std::vector<Atom> atoms, std::vector<Bond> bonds,
                              std::string source, int *bad_atom = nullptr);

  std::size_t atom_count() const { return atoms_.size(); }
  std::size_t bond_count() const { return bonds_.size(); }
  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond &bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  std::span<const Neighbor> neighbors(int i) const {
    return adjacency_[static_cast<std::size_t>(i)];
  }
  const RingInfo &rings() const { return rings_; }
  const std::string &source() const { return source_; }

  int implicit_hydrogens(int i) const {
    return implicit_h_[static_cast<std::size_t>(i)];
  }
  // Implicit hydrogens plus explicit hydrogen-atom neighbors.
  int total_hydrogens(int i) const;

  // Connected component id per atom, numbered by first appearance.
  const std::vector<int> &component_ids() const { return component_; }
  int component_count() const { return component_count_; }

  std::optional<int> bond_between(int a, int b) const;

  // Graph restricted to `keep` (ascending indices). Bonds to dropped atoms are
  // removed; bracket atoms keep their explicit hydrogen count.
  MolecularGraph subgraph(std::span<const int> keep) const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<int> implicit_h_;
  std::vector<int> component_;
  int component_count_ = 0;
  RingInfo rings_;
  std::string source_;
};

// Parses the supported SMILES subset. Stereo marks are read and dropped.
MolecularGraph parse_smiles(std::string_view text);

RingInfo perceive_rings(const MolecularGraph &graph);

std::string canonical_smiles(const MolecularGraph &graph);

int implicit_hydrogens(const MolecularGraph &graph, int atom_index);

// Parse + canonicalize in one step.
std::string canonicalize(std::string_view smiles);

} // namespace copas

#endif // COPAS_MOLGRAPH_H_
