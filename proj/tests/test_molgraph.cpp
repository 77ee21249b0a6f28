// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "copas/csv.h"
#include "copas/dataset.h"
#include "copas/error.h"
#include "copas/molgraph.h"
#include "support/generators.h"

using namespace copas;
using copas::testing::isomorphic;
using copas::testing::permute_atoms;
using copas::testing::random_molecule;

namespace {

std::size_t count_order(const MolecularGraph &g, BondOrder order) {
  std::size_t n = 0;
  for (const Bond &b : g.bonds()) n += b.order == order ? 1 : 0;
  return n;
}

ErrorCode parse_error_code(const std::string &s) {
  try {
    parse_smiles(s);
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected a parse error for " << s);
  return ErrorCode::kUsage;
}

std::vector<std::string> validation_smiles() {
  const CsvTable t = read_csv(copas::testing::data_path("validation_additives.csv"));
  std::vector<std::string> out;
  for (const auto &row : t.rows) out.push_back(row[t.require_column("smiles")]);
  return out;
}

} // namespace

TEST_CASE("acetamide parses to four heavy atoms with one double bond") {
  const MolecularGraph g = parse_smiles("CC(N)=O");
  CHECK(g.atom_count() == 4);
  CHECK(g.bond_count() == 3);
  CHECK(count_order(g, BondOrder::kDouble) == 1);
  CHECK(g.implicit_hydrogens(2) == 2);
  CHECK(g.implicit_hydrogens(3) == 0);
}

TEST_CASE("benzene is one aromatic six-ring") {
  const MolecularGraph g = parse_smiles("c1ccccc1");
  CHECK(g.atom_count() == 6);
  CHECK(count_order(g, BondOrder::kAromatic) == 6);
  REQUIRE(g.rings().rings.size() == 1);
  CHECK(g.rings().rings[0].size() == 6);
  for (const Atom &a : g.atoms()) CHECK(a.aromatic);
}

TEST_CASE("thiazole acid ring atoms") {
  const MolecularGraph g = parse_smiles("OC(=O)c1csc(Cl)n1");
  CHECK(g.atom_count() == 9);
  REQUIRE(g.rings().rings.size() == 1);
  std::multiset<std::string> ring_elements;
  for (int i : g.rings().rings[0]) {
    ring_elements.insert(std::string(element_info(g.atom(i).element).symbol));
    CHECK(g.atom(i).aromatic);
  }
  CHECK(ring_elements == std::multiset<std::string>{"C", "C", "C", "S", "N"});
}

TEST_CASE("ring perception examples") {
  CHECK(parse_smiles("CCCCCl").rings().rings.empty());
  const MolecularGraph naph = parse_smiles("c1ccc2ccccc2c1");
  REQUIRE(naph.rings().rings.size() == 2);
  CHECK(naph.rings().rings[0].size() == 6);
  CHECK(naph.rings().rings[1].size() == 6);
  // Cubane: cyclomatic number 12 - 8 + 1 = 5 four-rings.
  const MolecularGraph cubane = parse_smiles("C12C3C4C1C5C2C3C45");
  REQUIRE(cubane.rings().rings.size() == 5);
  for (const auto &r : cubane.rings().rings) CHECK(r.size() == 4);
}

TEST_CASE("parse errors name their kind and offset") {
  CHECK(parse_error_code("C1CC") == ErrorCode::kUnclosedRingBond);
  CHECK(parse_error_code("") == ErrorCode::kEmptyInput);
  CHECK(parse_error_code("CC(C") == ErrorCode::kUnbalancedParenthesis);
  CHECK(parse_error_code("CC)C") == ErrorCode::kUnbalancedParenthesis);
  CHECK(parse_error_code("C[Xx]") == ErrorCode::kUnknownElement);
  CHECK(parse_error_code("C(C)(C)(C)(C)C") == ErrorCode::kValenceViolation);
  CHECK(parse_error_code("cc") == ErrorCode::kNonRingAromatic);
  try {
    parse_smiles("CC(C");
  } catch (const ParseError &e) {
    CHECK(e.offset() <= 4);
  }
}

TEST_CASE("implicit hydrogen examples") {
  CHECK(parse_smiles("C=O").implicit_hydrogens(1) == 0);
  const MolecularGraph ammonium = parse_smiles("[NH4+]");
  CHECK(ammonium.implicit_hydrogens(0) == 4);
  CHECK(ammonium.total_hydrogens(0) == 4);
  CHECK(ammonium.atom(0).formal_charge == 1);
  CHECK(parse_smiles("C").implicit_hydrogens(0) == 4);
  CHECK(parse_smiles("c1ccccc1").implicit_hydrogens(0) == 1);
}

TEST_CASE("supported syntax: brackets, isotopes, stereo marks, dots, percent closures") {
  CHECK(canonicalize("[13CH4]") == canonicalize("C"));
  CHECK(canonicalize("F/C=C/F") == canonicalize("FC=CF"));
  CHECK(canonicalize("N[C@@H](C)C(=O)O") == canonicalize("NC(C)C(=O)O"));
  const MolecularGraph salt = parse_smiles("[Na+].[Cl-]");
  CHECK(salt.component_count() == 2);
  CHECK(canonicalize("C%10CCCCC%10") == canonicalize("C1CCCCC1"));
}

TEST_CASE("canonical form examples") {
  CHECK(canonicalize("OCC") == canonicalize("CCO"));
  CHECK(canonicalize("C") == "C");
  CHECK(canonicalize("n1ccccc1") == canonicalize("c1ccncc1"));
}

TEST_CASE("every validation SMILES parses and round-trips to an isomorphic graph") {
  const auto smiles = validation_smiles();
  REQUIRE(smiles.size() == 24);
  for (const std::string &s : smiles) {
    CAPTURE(s);
    const MolecularGraph g = parse_smiles(s);
    const std::string c = canonical_smiles(g);
    const MolecularGraph back = parse_smiles(c);
    CHECK(isomorphic(g, back));
    CHECK(canonical_smiles(back) == c);
  }
}

TEST_CASE("property: canonical output is idempotent and permutation invariant") {
  SplitMix64 rng(20240611);
  for (int trial = 0; trial < 500; ++trial) {
    const MolecularGraph g = random_molecule(rng, 10);
    const std::string c = canonical_smiles(g);
    CAPTURE(c);
    const MolecularGraph back = parse_smiles(c);
    CHECK(canonical_smiles(back) == c);
    CHECK(isomorphic(g, back));
    for (int k = 0; k < 3; ++k) CHECK(canonical_smiles(permute_atoms(g, rng)) == c);
  }
}

TEST_CASE("property: ring count equals the cyclomatic number") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const MolecularGraph g = random_molecule(rng, 12);
    const long expected = static_cast<long>(g.bond_count()) - static_cast<long>(g.atom_count()) +
                          g.component_count();
    CHECK(static_cast<long>(g.rings().rings.size()) == expected);
    for (const auto &ring : g.rings().rings) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        CHECK(g.bond_between(ring[i], ring[(i + 1) % ring.size()]).has_value());
      }
    }
  }
}

TEST_CASE("isomorphism oracle separates different molecules and matches respellings") {
  CHECK_FALSE(isomorphic(parse_smiles("CCO"), parse_smiles("COC")));
  CHECK_FALSE(isomorphic(parse_smiles("CC=O"), parse_smiles("C=CO")));
  CHECK(isomorphic(parse_smiles("C=CC"), parse_smiles("CC=C")));
  CHECK(isomorphic(parse_smiles("c1ccncc1"), parse_smiles("c1ccccn1")));
}
