// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <queue>
#include <set>
#include <vector>

#include "copas/error.h"
#include "copas/features.h"

namespace copas {
namespace {

void validate_pattern(const PatternKey &pattern) {
  const std::size_t n = pattern.atoms.size();
  if (n > kMaxPatternAtoms) {
    throw Error(ErrorCode::kPatternTooLarge, "key " + std::to_string(pattern.id) + " has " +
                                                 std::to_string(n) + " atoms (max 8)");
  }
  if (n == 0) throw Error(ErrorCode::kInvalidPattern, "key " + std::to_string(pattern.id) + " is empty");
  std::set<std::pair<int, int>> seen;
  for (const PatternBond &b : pattern.bonds) {
    if (b.a < 0 || b.b < 0 || static_cast<std::size_t>(b.a) >= n ||
        static_cast<std::size_t>(b.b) >= n || b.a == b.b ||
        !seen.insert(std::minmax(b.a, b.b)).second) {
      throw Error(ErrorCode::kInvalidPattern, "key " + std::to_string(pattern.id) + " has a bad bond");
    }
  }
}

struct CompiledPattern {
  std::vector<int> order;  // pattern atoms in BFS order
  // For order[k], k > 0: a previously placed pattern atom it is bonded to.
  std::vector<int> anchor;
  std::vector<std::vector<std::pair<int, std::optional<BondOrder>>>> adj;
};

CompiledPattern compile(const PatternKey &pattern) {
  const int n = static_cast<int>(pattern.atoms.size());
  CompiledPattern cp;
  cp.adj.assign(static_cast<std::size_t>(n), {});
  for (const PatternBond &b : pattern.bonds) {
    cp.adj[static_cast<std::size_t>(b.a)].emplace_back(b.b, b.order);
    cp.adj[static_cast<std::size_t>(b.b)].emplace_back(b.a, b.order);
  }
  std::vector<int> parent(static_cast<std::size_t>(n), -2);
  std::queue<int> q;
  q.push(0);
  parent[0] = -1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    cp.order.push_back(u);
    cp.anchor.push_back(parent[static_cast<std::size_t>(u)]);
    for (const auto &[v, order] : cp.adj[static_cast<std::size_t>(u)]) {
      if (parent[static_cast<std::size_t>(v)] == -2) {
        parent[static_cast<std::size_t>(v)] = u;
        q.push(v);
      }
    }
  }
  if (static_cast<int>(cp.order.size()) != n) {
    throw Error(ErrorCode::kInvalidPattern, "key " + std::to_string(pattern.id) + " is not connected");
  }
  return cp;
}

bool atom_matches(const PatternAtom &p, const Atom &a) {
  if (p.element && *p.element != a.element) return false;
  if (p.aromatic && *p.aromatic != a.aromatic) return false;
  return true;
}

class Matcher {
public:
  Matcher(const MolecularGraph &g, const PatternKey &p, const CompiledPattern &cp)
      : g_(g), p_(p), cp_(cp), map_(p.atoms.size(), -1), used_(g.atom_count(), false) {}

  int count() {
    extend(0);
    return static_cast<int>(images_.size());
  }

private:
  void extend(std::size_t k) {
    if (k == cp_.order.size()) {
      record();
      return;
    }
    const int pa = cp_.order[k];
    const int anchor = cp_.anchor[k];
    auto try_atom = [&](int ga) {
      if (used_[static_cast<std::size_t>(ga)]) return;
      if (!atom_matches(p_.atoms[static_cast<std::size_t>(pa)], g_.atom(ga))) return;
      // Every bond to an already placed pattern atom must exist in the graph.
      for (const auto &[pb, order] : cp_.adj[static_cast<std::size_t>(pa)]) {
        const int gb = map_[static_cast<std::size_t>(pb)];
        if (gb < 0) continue;
        const auto bond = g_.bond_between(ga, gb);
        if (!bond) return;
        if (order && g_.bond(*bond).order != *order) return;
      }
      map_[static_cast<std::size_t>(pa)] = ga;
      used_[static_cast<std::size_t>(ga)] = true;
      extend(k + 1);
      used_[static_cast<std::size_t>(ga)] = false;
      map_[static_cast<std::size_t>(pa)] = -1;
    };
    if (anchor < 0) {
      for (int ga = 0; ga < static_cast<int>(g_.atom_count()); ++ga) try_atom(ga);
    } else {
      for (const Neighbor &nb : g_.neighbors(map_[static_cast<std::size_t>(anchor)])) {
        try_atom(nb.atom);
      }
    }
  }

  void record() {
    std::vector<int> image(map_.begin(), map_.end());
    std::sort(image.begin(), image.end());
    std::vector<int> bonds;
    for (const PatternBond &b : p_.bonds) {
      bonds.push_back(*g_.bond_between(map_[static_cast<std::size_t>(b.a)],
                                       map_[static_cast<std::size_t>(b.b)]));
    }
    std::sort(bonds.begin(), bonds.end());
    image.push_back(-1);
    image.insert(image.end(), bonds.begin(), bonds.end());
    images_.insert(std::move(image));
  }

  const MolecularGraph &g_;
  const PatternKey &p_;
  const CompiledPattern &cp_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::set<std::vector<int>> images_;
};

} // namespace

int match_pattern(const MolecularGraph &graph, const PatternKey &pattern) {
  validate_pattern(pattern);
  const CompiledPattern cp = compile(pattern);
  return Matcher(graph, pattern, cp).count();
}

std::vector<std::uint8_t> fingerprint(const MolecularGraph &graph, const KeySet &keyset) {
  std::vector<std::uint8_t> bits(keyset.size(), 0);
  for (std::size_t i = 0; i < keyset.size(); ++i) {
    const PatternKey &key = keyset.keys[i];
    bits[i] = match_pattern(graph, key) >= key.min_count ? 1 : 0;
  }
  return bits;
}

} // namespace copas
