// SPDX-License-Identifier: Apache-2.0
//
// Canonical SMILES.
//
// Atoms are ranked by iterative neighborhood refinement of an invariant
// (atomic number, aromaticity, charge, hydrogen count, heavy degree, total
// degree, ring membership). Remaining ties are broken by individualizing each
// member of the lowest tied class in turn and refining again; every fully
// discrete ranking is written out and the lexicographically smallest string
// wins. Because the set of explored rankings does not depend on input atom
// order, neither does the result. A leaf budget bounds the search on highly
// symmetric inputs; terminal atoms sharing a parent are interchangeable and
// are individualized only once.

#include <algorithm>
#include <cstdlib>
#include <string>
#include <tuple>
#include <vector>

#include "copas/molgraph.h"
#include "hydrogens.h"

namespace copas {
namespace {

constexpr int kLeafBudget = 2048;

int bond_code(BondOrder order) { return static_cast<int>(order); }

std::vector<int> dense_rank_by(const std::vector<std::size_t> &order_hint,
                               std::size_t n, auto &&less) {
  std::vector<int> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(order_hint[i]);
  std::stable_sort(idx.begin(), idx.end(), less);
  std::vector<int> rank(n, 0);
  int r = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && less(idx[k - 1], idx[k])) ++r;
    rank[static_cast<std::size_t>(idx[k])] = r;
  }
  return rank;
}

int count_classes(const std::vector<int> &rank) {
  int mx = -1;
  for (int r : rank) mx = std::max(mx, r);
  return mx + 1;
}

class Canonicalizer {
public:
  explicit Canonicalizer(const MolecularGraph &g) : g_(g), n_(g.atom_count()) {}

  std::string run() {
    if (n_ == 0) return "";
    using Inv = std::tuple<int, bool, int, int, int, int, bool>;
    std::vector<Inv> inv(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const int a = static_cast<int>(i);
      const Atom &atom = g_.atom(a);
      inv[i] = {element_info(atom.element).atomic_number, atom.aromatic,
                atom.formal_charge, g_.total_hydrogens(a), atom.degree,
                static_cast<int>(g_.neighbors(a).size()),
                static_cast<bool>(g_.rings().ring_membership[i])};
    }
    std::vector<std::size_t> hint(n_);
    for (std::size_t i = 0; i < n_; ++i) hint[i] = i;
    auto rank = dense_rank_by(hint, n_, [&](int x, int y) {
      return inv[static_cast<std::size_t>(x)] < inv[static_cast<std::size_t>(y)];
    });
    search(std::move(rank));
    return best_;
  }

private:
  std::vector<int> refine(std::vector<int> rank) const {
    std::vector<std::size_t> hint(n_);
    for (std::size_t i = 0; i < n_; ++i) hint[i] = i;
    rank = dense_rank_by(hint, n_, [&](int x, int y) {
      return rank[static_cast<std::size_t>(x)] < rank[static_cast<std::size_t>(y)];
    });
    int classes = count_classes(rank);
    std::vector<std::vector<std::pair<int, int>>> nbr_keys(n_);
    while (classes < static_cast<int>(n_)) {
      for (std::size_t i = 0; i < n_; ++i) {
        auto &keys = nbr_keys[i];
        keys.clear();
        for (const Neighbor &nb : g_.neighbors(static_cast<int>(i))) {
          keys.emplace_back(rank[static_cast<std::size_t>(nb.atom)],
                            bond_code(g_.bond(nb.bond).order));
        }
        std::sort(keys.begin(), keys.end());
      }
      auto next = dense_rank_by(hint, n_, [&](int x, int y) {
        const auto ux = static_cast<std::size_t>(x);
        const auto uy = static_cast<std::size_t>(y);
        if (rank[ux] != rank[uy]) return rank[ux] < rank[uy];
        return nbr_keys[ux] < nbr_keys[uy];
      });
      const int next_classes = count_classes(next);
      rank = std::move(next);
      if (next_classes == classes) break;
      classes = next_classes;
    }
    return rank;
  }

  void search(std::vector<int> rank) {
    rank = refine(std::move(rank));
    if (count_classes(rank) == static_cast<int>(n_)) {
      ++leaves_;
      std::string s = write(rank);
      if (best_.empty() || s < best_) best_ = std::move(s);
      return;
    }
    // Lowest tied class.
    std::vector<int> counts(n_, 0);
    for (int r : rank) ++counts[static_cast<std::size_t>(r)];
    int target = 0;
    while (counts[static_cast<std::size_t>(target)] < 2) ++target;
    std::vector<int> members;
    for (std::size_t i = 0; i < n_; ++i) {
      if (rank[i] == target) members.push_back(static_cast<int>(i));
    }
    if (interchangeable_terminals(members)) members.resize(1);
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k > 0 && leaves_ >= kLeafBudget) break;
      std::vector<int> child(n_);
      for (std::size_t i = 0; i < n_; ++i) child[i] = rank[i] * 2;
      child[static_cast<std::size_t>(members[k])] -= 1;
      search(std::move(child));
    }
  }

  // All members are degree-1 atoms hanging off the same atom via the same
  // bond order: swapping any two of them is an automorphism.
  bool interchangeable_terminals(const std::vector<int> &members) const {
    int parent = -1;
    int order = -1;
    for (int a : members) {
      const auto nbs = g_.neighbors(a);
      if (nbs.size() != 1) return false;
      const int o = bond_code(g_.bond(nbs[0].bond).order);
      if (parent < 0) {
        parent = nbs[0].atom;
        order = o;
      } else if (nbs[0].atom != parent || o != order) {
        return false;
      }
    }
    return true;
  }

  std::string atom_text(int a) const {
    const Atom &atom = g_.atom(a);
    const auto &info = element_info(atom.element);
    const int h = g_.implicit_hydrogens(a);
    bool bracket = !info.organic_subset || atom.formal_charge != 0;
    if (!bracket) {
      std::vector<BondOrder> orders;
      for (const Neighbor &nb : g_.neighbors(a)) orders.push_back(g_.bond(nb.bond).order);
      Atom plain = atom;
      plain.bracket = false;
      const auto organic_h = internal::organic_hydrogens(plain, orders);
      bracket = !organic_h || *organic_h != h;
    }
    std::string symbol(info.symbol);
    if (atom.aromatic) {
      for (char &c : symbol) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (!bracket) return symbol;
    std::string out = "[" + symbol;
    if (h > 0) {
      out += 'H';
      if (h > 1) out += std::to_string(h);
    }
    if (atom.formal_charge != 0) {
      out += atom.formal_charge > 0 ? '+' : '-';
      if (std::abs(atom.formal_charge) > 1) out += std::to_string(std::abs(atom.formal_charge));
    }
    out += ']';
    return out;
  }

  std::string bond_text(int bond) const {
    const Bond &b = g_.bond(bond);
    switch (b.order) {
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kAromatic: return "";
    case BondOrder::kSingle:
      return g_.atom(b.begin).aromatic && g_.atom(b.end).aromatic ? "-" : "";
    }
    return "";
  }

  struct WriteState {
    std::vector<bool> visited;
    std::vector<bool> bond_done;
    std::vector<std::vector<Neighbor>> children;
    std::vector<std::vector<int>> opens;   // ring bonds opened at atom
    std::vector<std::vector<int>> closes;  // ring bonds closed at atom
    std::vector<int> ring_digit;           // per bond
    std::vector<bool> digit_used;
  };

  void dfs_structure(int u, int parent_bond, const std::vector<int> &rank,
                     WriteState &st) const {
    st.visited[static_cast<std::size_t>(u)] = true;
    std::vector<Neighbor> nbs(g_.neighbors(u).begin(), g_.neighbors(u).end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor &x, const Neighbor &y) {
      return rank[static_cast<std::size_t>(x.atom)] < rank[static_cast<std::size_t>(y.atom)];
    });
    for (const Neighbor &nb : nbs) {
      if (nb.bond == parent_bond) continue;
      if (!st.visited[static_cast<std::size_t>(nb.atom)]) {
        st.bond_done[static_cast<std::size_t>(nb.bond)] = true;
        st.children[static_cast<std::size_t>(u)].push_back(nb);
        dfs_structure(nb.atom, nb.bond, rank, st);
      } else if (!st.bond_done[static_cast<std::size_t>(nb.bond)]) {
        st.bond_done[static_cast<std::size_t>(nb.bond)] = true;
        st.opens[static_cast<std::size_t>(nb.atom)].push_back(nb.bond);
        st.closes[static_cast<std::size_t>(u)].push_back(nb.bond);
      }
    }
  }

  static std::string digit_text(int d) {
    return d < 10 ? std::to_string(d) : "%" + std::to_string(d);
  }

  void emit(int u, WriteState &st, std::string &out) const {
    out += atom_text(u);
    for (int b : st.closes[static_cast<std::size_t>(u)]) {
      const int d = st.ring_digit[static_cast<std::size_t>(b)];
      out += digit_text(d);
      st.digit_used[static_cast<std::size_t>(d)] = false;
    }
    for (int b : st.opens[static_cast<std::size_t>(u)]) {
      int d = 1;
      while (st.digit_used[static_cast<std::size_t>(d)]) ++d;
      st.digit_used[static_cast<std::size_t>(d)] = true;
      st.ring_digit[static_cast<std::size_t>(b)] = d;
      out += bond_text(b);
      out += digit_text(d);
    }
    const auto &kids = st.children[static_cast<std::size_t>(u)];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool last = k + 1 == kids.size();
      if (!last) out += '(';
      out += bond_text(kids[k].bond);
      emit(kids[k].atom, st, out);
      if (!last) out += ')';
    }
  }

  std::string write(const std::vector<int> &rank) const {
    WriteState st;
    st.visited.assign(n_, false);
    st.bond_done.assign(g_.bond_count(), false);
    st.children.assign(n_, {});
    st.opens.assign(n_, {});
    st.closes.assign(n_, {});
    st.ring_digit.assign(g_.bond_count(), 0);
    st.digit_used.assign(100, false);
    std::vector<int> by_rank(n_);
    for (std::size_t i = 0; i < n_; ++i) by_rank[static_cast<std::size_t>(rank[i])] = static_cast<int>(i);
    // Each component starts at its lowest-ranked atom of minimal degree;
    // components follow in order of their start ranks.
    const auto &comp = g_.component_ids();
    std::vector<int> comp_start(static_cast<std::size_t>(g_.component_count()), -1);
    for (int a : by_rank) {
      int &s = comp_start[static_cast<std::size_t>(comp[static_cast<std::size_t>(a)])];
      if (s < 0 || g_.neighbors(a).size() < g_.neighbors(s).size()) s = a;
    }
    std::vector<int> starts = comp_start;
    std::sort(starts.begin(), starts.end(), [&](int x, int y) {
      return rank[static_cast<std::size_t>(x)] < rank[static_cast<std::size_t>(y)];
    });
    for (int a : starts) dfs_structure(a, -1, rank, st);
    std::string out;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      if (k > 0) out += '.';
      emit(starts[k], st, out);
    }
    return out;
  }

  const MolecularGraph &g_;
  std::size_t n_;
  int leaves_ = 0;
  std::string best_;
};

} // namespace

std::string canonical_smiles(const MolecularGraph &graph) {
  return Canonicalizer(graph).run();
}

} // namespace copas
