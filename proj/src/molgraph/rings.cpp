// SPDX-License-Identifier: Apache-2.0
//
// SSSR perception from Horton's candidate set: for every root x and edge
// (u, v), the cycle P(x,u) + (u,v) + P(v,x) built from a BFS tree rooted at x.
// Candidates are sorted by (size, sorted atom tuple) and accepted greedily when
// linearly independent over GF(2), which yields a minimum cycle basis.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <vector>

#include "copas/molgraph.h"

namespace copas {
namespace {

using EdgeSet = std::vector<std::uint64_t>;

struct Candidate {
  std::vector<int> sorted_atoms;
  std::vector<int> cycle;
  EdgeSet edges;
};

bool candidate_less(const Candidate &a, const Candidate &b) {
  if (a.sorted_atoms.size() != b.sorted_atoms.size()) {
    return a.sorted_atoms.size() < b.sorted_atoms.size();
  }
  return a.sorted_atoms < b.sorted_atoms;
}

class Gf2Basis {
public:
  explicit Gf2Basis(std::size_t words) : words_(words) {}

  // Reduces `v` against the basis; inserts it and returns true if independent.
  bool insert(EdgeSet v) {
    for (const auto &[pivot, row] : rows_) {
      if (v[pivot / 64] >> (pivot % 64) & 1U) {
        for (std::size_t w = 0; w < words_; ++w) v[w] ^= row[w];
      }
    }
    for (std::size_t w = 0; w < words_; ++w) {
      if (v[w] != 0) {
        const std::size_t pivot =
            w * 64 + static_cast<std::size_t>(__builtin_ctzll(v[w]));
        for (auto &[p, row] : rows_) {
          if (row[pivot / 64] >> (pivot % 64) & 1U) {
            for (std::size_t k = 0; k < words_; ++k) row[k] ^= v[k];
          }
        }
        rows_.emplace_back(pivot, std::move(v));
        return true;
      }
    }
    return false;
  }

private:
  std::size_t words_;
  std::vector<std::pair<std::size_t, EdgeSet>> rows_;
};

} // namespace

RingInfo perceive_rings(const MolecularGraph &graph) {
  const int n = static_cast<int>(graph.atom_count());
  const int m = static_cast<int>(graph.bond_count());
  RingInfo info;
  info.ring_membership.assign(static_cast<std::size_t>(n), false);
  info.ring_bond.assign(static_cast<std::size_t>(m), false);

  // Strip tree-like appendages: atoms of (remaining) degree <= 1.
  std::vector<int> deg(static_cast<std::size_t>(n));
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    deg[static_cast<std::size_t>(i)] = static_cast<int>(graph.neighbors(i).size());
    if (deg[static_cast<std::size_t>(i)] <= 1) stack.push_back(i);
  }
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (!alive[static_cast<std::size_t>(u)]) continue;
    alive[static_cast<std::size_t>(u)] = false;
    for (const Neighbor &nb : graph.neighbors(u)) {
      if (alive[static_cast<std::size_t>(nb.atom)] &&
          --deg[static_cast<std::size_t>(nb.atom)] <= 1) {
        stack.push_back(nb.atom);
      }
    }
  }

  int core_atoms = 0;
  int core_bonds = 0;
  for (int i = 0; i < n; ++i) core_atoms += alive[static_cast<std::size_t>(i)] ? 1 : 0;
  for (int b = 0; b < m; ++b) {
    const Bond &bond = graph.bond(b);
    if (alive[static_cast<std::size_t>(bond.begin)] &&
        alive[static_cast<std::size_t>(bond.end)]) {
      ++core_bonds;
    }
  }
  if (core_atoms == 0) return info;

  // Components of the stripped core.
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int components = 0;
  for (int s = 0; s < n; ++s) {
    if (!alive[static_cast<std::size_t>(s)] || comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    comp[static_cast<std::size_t>(s)] = components;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const Neighbor &nb : graph.neighbors(u)) {
        if (alive[static_cast<std::size_t>(nb.atom)] &&
            comp[static_cast<std::size_t>(nb.atom)] < 0) {
          comp[static_cast<std::size_t>(nb.atom)] = components;
          q.push(nb.atom);
        }
      }
    }
    ++components;
  }
  const int cyclomatic = core_bonds - core_atoms + components;
  if (cyclomatic <= 0) return info;

  const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;
  std::vector<Candidate> candidates;
  std::set<std::vector<int>> seen_edge_sets;

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::vector<int> parent_bond(static_cast<std::size_t>(n));
  std::vector<int> dist(static_cast<std::size_t>(n));
  for (int root = 0; root < n; ++root) {
    if (!alive[static_cast<std::size_t>(root)]) continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(parent_bond.begin(), parent_bond.end(), -1);
    std::queue<int> q;
    q.push(root);
    dist[static_cast<std::size_t>(root)] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      std::vector<Neighbor> nbs(graph.neighbors(u).begin(), graph.neighbors(u).end());
      std::sort(nbs.begin(), nbs.end(),
                [](const Neighbor &a, const Neighbor &b) { return a.atom < b.atom; });
      for (const Neighbor &nb : nbs) {
        if (!alive[static_cast<std::size_t>(nb.atom)] ||
            dist[static_cast<std::size_t>(nb.atom)] >= 0) {
          continue;
        }
        dist[static_cast<std::size_t>(nb.atom)] = dist[static_cast<std::size_t>(u)] + 1;
        parent[static_cast<std::size_t>(nb.atom)] = u;
        parent_bond[static_cast<std::size_t>(nb.atom)] = nb.bond;
        q.push(nb.atom);
      }
    }

    auto path_to_root = [&](int v) {
      std::vector<int> path;
      for (int x = v; x != -1; x = parent[static_cast<std::size_t>(x)]) path.push_back(x);
      return path;  // v ... root
    };

    for (int b = 0; b < m; ++b) {
      const Bond &bond = graph.bond(b);
      const int u = bond.begin;
      const int v = bond.end;
      if (dist[static_cast<std::size_t>(u)] < 0 || dist[static_cast<std::size_t>(v)] < 0) continue;
      if (parent_bond[static_cast<std::size_t>(u)] == b ||
          parent_bond[static_cast<std::size_t>(v)] == b) {
        continue;
      }
      std::vector<int> pu = path_to_root(u);
      std::vector<int> pv = path_to_root(v);
      // Paths must share only the root.
      std::vector<int> su(pu.begin(), pu.end() - 1);
      std::vector<int> sv(pv.begin(), pv.end() - 1);
      std::sort(su.begin(), su.end());
      std::sort(sv.begin(), sv.end());
      std::vector<int> common;
      std::set_intersection(su.begin(), su.end(), sv.begin(), sv.end(),
                            std::back_inserter(common));
      if (!common.empty()) continue;

      Candidate c;
      // cycle: root ... u, then v ... (back to root)
      c.cycle.assign(pu.rbegin(), pu.rend());
      c.cycle.insert(c.cycle.end(), pv.begin(), pv.end() - 1);
      c.edges.assign(words, 0);
      std::vector<int> edge_ids;
      auto add_edge = [&](int e) {
        c.edges[static_cast<std::size_t>(e) / 64] |= std::uint64_t{1} << (e % 64);
        edge_ids.push_back(e);
      };
      add_edge(b);
      for (std::size_t k = 0; k + 1 < pu.size(); ++k) add_edge(parent_bond[static_cast<std::size_t>(pu[k])]);
      for (std::size_t k = 0; k + 1 < pv.size(); ++k) add_edge(parent_bond[static_cast<std::size_t>(pv[k])]);
      std::sort(edge_ids.begin(), edge_ids.end());
      if (!seen_edge_sets.insert(edge_ids).second) continue;
      c.sorted_atoms = c.cycle;
      std::sort(c.sorted_atoms.begin(), c.sorted_atoms.end());
      candidates.push_back(std::move(c));
    }
  }

  std::sort(candidates.begin(), candidates.end(), candidate_less);
  Gf2Basis basis(words);
  for (Candidate &c : candidates) {
    if (static_cast<int>(info.rings.size()) == cyclomatic) break;
    if (!basis.insert(c.edges)) continue;
    // Normalize cycle order: start at smallest atom, step toward the smaller
    // of its two ring neighbors.
    auto &cyc = c.cycle;
    const auto min_it = std::min_element(cyc.begin(), cyc.end());
    std::rotate(cyc.begin(), min_it, cyc.end());
    if (cyc.size() > 2 && cyc.back() < cyc[1]) std::reverse(cyc.begin() + 1, cyc.end());
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      info.ring_membership[static_cast<std::size_t>(cyc[k])] = true;
      const auto bond = graph.bond_between(cyc[k], cyc[(k + 1) % cyc.size()]);
      if (bond) info.ring_bond[static_cast<std::size_t>(*bond)] = true;
    }
    info.rings.push_back(std::move(cyc));
  }
  return info;
}

} // namespace copas
