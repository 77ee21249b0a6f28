// SPDX-License-Identifier: Apache-2.0
//
// The 24 native descriptors. Hydrogen-bond acceptors are all N and O atoms
// regardless of charge; donors are N or O atoms carrying at least one H;
// rotatable bonds are acyclic single bonds between atoms of heavy degree >= 2.
// logP and TPSA are deliberately not part of this set.

#include <algorithm>
#include <array>
#include <vector>

#include "copas/error.h"
#include "copas/features.h"

namespace copas {
namespace {

constexpr std::array<std::string_view, kDescriptorCount> kNames = {
    "heavy_atom_count", "molecular_weight", "ring_count",     "aromatic_ring_count",
    "hba_count",        "hbd_count",        "rotatable_bonds", "halogen_count",
    "heteroatom_count", "net_formal_charge", "fraction_aromatic_atoms", "max_ring_size",
    "double_bond_count", "triple_bond_count", "count_C",       "count_N",
    "count_O",          "count_S",          "count_P",        "count_F",
    "count_Cl",         "count_Br",         "count_I",        "component_count",
};

enum Index : std::size_t {
  kHeavy, kWeight, kRings, kAromaticRings, kHba, kHbd, kRotatable, kHalogen,
  kHetero, kCharge, kFracAromatic, kMaxRing, kDoubleBonds, kTripleBonds,
  kCountC, kCountN, kCountO, kCountS, kCountP, kCountF, kCountCl, kCountBr,
  kCountI, kComponents,
};

} // namespace

const std::array<std::string_view, kDescriptorCount> &descriptor_names() { return kNames; }

double DescriptorVector::operator[](std::string_view name) const {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return values[i];
  }
  throw Error(ErrorCode::kUnknownColumn, "no descriptor named '" + std::string(name) + "'");
}

double molecular_weight(const MolecularGraph &graph) {
  // Summed per element from integer counts so atom order cannot change rounding.
  std::array<long, kElementCount> counts{};
  for (int i = 0; i < static_cast<int>(graph.atom_count()); ++i) {
    ++counts[static_cast<std::size_t>(graph.atom(i).element)];
    counts[static_cast<std::size_t>(Element::kH)] += graph.implicit_hydrogens(i);
  }
  double mw = 0.0;
  for (int e = 0; e < kElementCount; ++e) {
    mw += element_info(static_cast<Element>(e)).mass * static_cast<double>(counts[static_cast<std::size_t>(e)]);
  }
  return mw;
}

DescriptorVector descriptors(const MolecularGraph &graph) {
  DescriptorVector d;
  auto &v = d.values;
  int heavy = 0;
  int aromatic_heavy = 0;
  for (int i = 0; i < static_cast<int>(graph.atom_count()); ++i) {
    const Atom &a = graph.atom(i);
    if (a.element == Element::kH) continue;
    ++heavy;
    if (a.aromatic) ++aromatic_heavy;
    v[kCharge] += a.formal_charge;
    if (a.element != Element::kC) v[kHetero] += 1;
    if (is_halogen(a.element)) v[kHalogen] += 1;
    const bool n_or_o = a.element == Element::kN || a.element == Element::kO;
    if (n_or_o) {
      v[kHba] += 1;
      if (graph.total_hydrogens(i) > 0) v[kHbd] += 1;
    }
    switch (a.element) {
    case Element::kC: v[kCountC] += 1; break;
    case Element::kN: v[kCountN] += 1; break;
    case Element::kO: v[kCountO] += 1; break;
    case Element::kS: v[kCountS] += 1; break;
    case Element::kP: v[kCountP] += 1; break;
    case Element::kF: v[kCountF] += 1; break;
    case Element::kCl: v[kCountCl] += 1; break;
    case Element::kBr: v[kCountBr] += 1; break;
    case Element::kI: v[kCountI] += 1; break;
    default: break;
    }
  }
  v[kHeavy] = heavy;
  v[kWeight] = molecular_weight(graph);
  v[kFracAromatic] = heavy > 0 ? static_cast<double>(aromatic_heavy) / heavy : 0.0;

  const RingInfo &rings = graph.rings();
  v[kRings] = static_cast<double>(rings.rings.size());
  for (const auto &ring : rings.rings) {
    v[kMaxRing] = std::max(v[kMaxRing], static_cast<double>(ring.size()));
  }
  // Cycle rank of the subgraph of aromatic atoms. Equals the number of
  // all-aromatic rings in the ring set, but does not depend on which of
  // several equal-size ring sets was chosen.
  {
    const int n = static_cast<int>(graph.atom_count());
    std::vector<int> root(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) root[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
      while (root[static_cast<std::size_t>(x)] != x) {
        root[static_cast<std::size_t>(x)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
        x = root[static_cast<std::size_t>(x)];
      }
      return x;
    };
    int cycles = 0;
    for (const Bond &bond : graph.bonds()) {
      if (!graph.atom(bond.begin).aromatic || !graph.atom(bond.end).aromatic) continue;
      const int a = find(bond.begin);
      const int b = find(bond.end);
      if (a == b) {
        ++cycles;
      } else {
        root[static_cast<std::size_t>(a)] = b;
      }
    }
    v[kAromaticRings] = cycles;
  }

  for (int b = 0; b < static_cast<int>(graph.bond_count()); ++b) {
    const Bond &bond = graph.bond(b);
    if (bond.order == BondOrder::kDouble) v[kDoubleBonds] += 1;
    if (bond.order == BondOrder::kTriple) v[kTripleBonds] += 1;
    if (bond.order == BondOrder::kSingle && !rings.ring_bond[static_cast<std::size_t>(b)] &&
        graph.atom(bond.begin).degree >= 2 && graph.atom(bond.end).degree >= 2 &&
        graph.atom(bond.begin).element != Element::kH &&
        graph.atom(bond.end).element != Element::kH) {
      v[kRotatable] += 1;
    }
  }
  v[kComponents] = graph.component_count();
  return d;
}

} // namespace copas
