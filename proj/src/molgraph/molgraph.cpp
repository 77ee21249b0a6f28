// SPDX-License-Identifier: Apache-2.0

#include "copas/molgraph.h"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <utility>

#include "copas/error.h"
#include "hydrogens.h"

namespace copas {

int bond_valence(BondOrder order) {
  switch (order) {
  case BondOrder::kSingle: return 1;
  case BondOrder::kDouble: return 2;
  case BondOrder::kTriple: return 3;
  case BondOrder::kAromatic: return 1;
  }
  return 1;
}

namespace internal {

std::optional<int> organic_hydrogens(const Atom &atom,
                                     std::span<const BondOrder> orders) {
  const auto &info = element_info(atom.element);
  const int max_valence = info.valences.back();
  int used = 0;
  bool multiple = false;
  for (BondOrder o : orders) {
    used += bond_valence(o);
    if (o == BondOrder::kDouble || o == BondOrder::kTriple) multiple = true;
  }
  if (used > max_valence) return std::nullopt;
  if (atom.aromatic) {
    // Chalcogens donate a lone pair to the ring and carry no hydrogen.
    if (atom.element == Element::kO || atom.element == Element::kS ||
        atom.element == Element::kSe) {
      return 0;
    }
    if (!multiple && used + 1 <= max_valence) ++used;
  }
  for (int v : info.valences) {
    if (v >= used) return v - used;
  }
  return std::nullopt;
}

bool bracket_valence_ok(const Atom &atom, std::span<const BondOrder> orders) {
  int used = atom.explicit_h;
  for (BondOrder o : orders) used += bond_valence(o);
  const auto &info = element_info(atom.element);
  return used <= info.valences.back() + std::abs(atom.formal_charge);
}

} // namespace internal

MolecularGraph MolecularGraph::build(std::vector<Atom> atoms,
                                     std::vector<Bond> bonds,
                                     std::string source, int *bad_atom) {
  MolecularGraph g;
  g.atoms_ = std::move(atoms);
  g.bonds_ = std::move(bonds);
  g.source_ = std::move(source);
  const int n = static_cast<int>(g.atoms_.size());
  auto fail = [&](ErrorCode code, int atom, const std::string &msg) {
    if (bad_atom != nullptr) *bad_atom = atom;
    throw Error(code, msg);
  };

  g.adjacency_.assign(g.atoms_.size(), {});
  for (std::size_t b = 0; b < g.bonds_.size(); ++b) {
    const Bond &bond = g.bonds_[b];
    if (bond.begin < 0 || bond.end < 0 || bond.begin >= n || bond.end >= n) {
      fail(ErrorCode::kInvalidSyntax, -1, "bond endpoint out of range");
    }
    if (bond.begin == bond.end) {
      fail(ErrorCode::kInvalidSyntax, bond.begin, "bond joins an atom to itself");
    }
    for (const Neighbor &nb : g.adjacency_[static_cast<std::size_t>(bond.begin)]) {
      if (nb.atom == bond.end) {
        fail(ErrorCode::kInvalidSyntax, bond.end, "duplicate bond between atoms " +
             std::to_string(bond.begin) + " and " + std::to_string(bond.end));
      }
    }
    if (bond.order == BondOrder::kAromatic &&
        (!g.atoms_[static_cast<std::size_t>(bond.begin)].aromatic ||
         !g.atoms_[static_cast<std::size_t>(bond.end)].aromatic)) {
      fail(ErrorCode::kInvalidSyntax, bond.begin,
           "aromatic bond between non-aromatic atoms");
    }
    const int bi = static_cast<int>(b);
    g.adjacency_[static_cast<std::size_t>(bond.begin)].push_back({bond.end, bi});
    g.adjacency_[static_cast<std::size_t>(bond.end)].push_back({bond.begin, bi});
  }

  g.implicit_h_.assign(g.atoms_.size(), 0);
  std::vector<BondOrder> orders;
  for (int i = 0; i < n; ++i) {
    Atom &atom = g.atoms_[static_cast<std::size_t>(i)];
    orders.clear();
    atom.degree = 0;
    for (const Neighbor &nb : g.adjacency_[static_cast<std::size_t>(i)]) {
      orders.push_back(g.bonds_[static_cast<std::size_t>(nb.bond)].order);
      if (g.atoms_[static_cast<std::size_t>(nb.atom)].element != Element::kH) {
        ++atom.degree;
      }
    }
    if (atom.bracket) {
      if (!internal::bracket_valence_ok(atom, orders)) {
        fail(ErrorCode::kValenceViolation, i,
             "valence exceeded on " + std::string(element_info(atom.element).symbol));
      }
      g.implicit_h_[static_cast<std::size_t>(i)] = atom.explicit_h;
    } else {
      auto h = internal::organic_hydrogens(atom, orders);
      if (!h) {
        fail(ErrorCode::kValenceViolation, i,
             "valence exceeded on " + std::string(element_info(atom.element).symbol));
      }
      g.implicit_h_[static_cast<std::size_t>(i)] = *h;
    }
  }

  g.component_.assign(g.atoms_.size(), -1);
  for (int start = 0; start < n; ++start) {
    if (g.component_[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = g.component_count_++;
    std::queue<int> queue;
    queue.push(start);
    g.component_[static_cast<std::size_t>(start)] = id;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (const Neighbor &nb : g.adjacency_[static_cast<std::size_t>(u)]) {
        if (g.component_[static_cast<std::size_t>(nb.atom)] < 0) {
          g.component_[static_cast<std::size_t>(nb.atom)] = id;
          queue.push(nb.atom);
        }
      }
    }
  }

  g.rings_ = perceive_rings(g);
  for (int i = 0; i < n; ++i) {
    if (g.atoms_[static_cast<std::size_t>(i)].aromatic &&
        !g.rings_.ring_membership[static_cast<std::size_t>(i)]) {
      fail(ErrorCode::kNonRingAromatic, i, "aromatic atom outside any ring");
    }
  }
  for (std::size_t b = 0; b < g.bonds_.size(); ++b) {
    if (g.bonds_[b].order == BondOrder::kAromatic && !g.rings_.ring_bond[b]) {
      fail(ErrorCode::kNonRingAromatic, g.bonds_[b].begin,
           "aromatic bond outside any ring");
    }
  }
  return g;
}

int MolecularGraph::total_hydrogens(int i) const {
  int h = implicit_hydrogens(i);
  for (const Neighbor &nb : neighbors(i)) {
    if (atom(nb.atom).element == Element::kH) ++h;
  }
  return h;
}

std::optional<int> MolecularGraph::bond_between(int a, int b) const {
  for (const Neighbor &nb : neighbors(a)) {
    if (nb.atom == b) return nb.bond;
  }
  return std::nullopt;
}

MolecularGraph MolecularGraph::subgraph(std::span<const int> keep) const {
  std::vector<int> remap(atoms_.size(), -1);
  std::vector<Atom> atoms;
  atoms.reserve(keep.size());
  for (int idx : keep) {
    remap[static_cast<std::size_t>(idx)] = static_cast<int>(atoms.size());
    atoms.push_back(atoms_[static_cast<std::size_t>(idx)]);
  }
  std::vector<Bond> bonds;
  for (const Bond &b : bonds_) {
    const int x = remap[static_cast<std::size_t>(b.begin)];
    const int y = remap[static_cast<std::size_t>(b.end)];
    if (x >= 0 && y >= 0) bonds.push_back({x, y, b.order});
  }
  return build(std::move(atoms), std::move(bonds), source_);
}

int implicit_hydrogens(const MolecularGraph &graph, int atom_index) {
  return graph.implicit_hydrogens(atom_index);
}

std::string canonicalize(std::string_view smiles) {
  return canonical_smiles(parse_smiles(smiles));
}

} // namespace copas
