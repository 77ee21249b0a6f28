// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>
#include <vector>

#include "copas/dataset.h"
#include "copas/error.h"
#include "copas/scaffold.h"
#include "support/generators.h"

using namespace copas;
using copas::testing::data_path;
using copas::testing::graft_side_chain;
using copas::testing::random_molecule;
using copas::testing::throws_code;

namespace {

std::string scaffold_of(const std::string &smiles) {
  return extract_scaffold(parse_smiles(smiles)).canonical;
}

} // namespace

TEST_CASE("hand-derived scaffolds") {
  CHECK(scaffold_of("CCCCCl").empty());
  CHECK(scaffold_of("Nc1ccncc1") == canonicalize("c1ccncc1"));
  CHECK(scaffold_of("OC(=O)c1csc(Cl)n1") == canonicalize("c1cscn1"));
  CHECK(scaffold_of("c1ccc(-c2ccccc2)cc1") == canonicalize("c1ccc(-c2ccccc2)cc1"));
}

TEST_CASE("linkers and exocyclic double bonds stay, side chains go") {
  CHECK(scaffold_of("CCc1ccc(CCc2ccccc2)cc1") == canonicalize("c1ccc(CCc2ccccc2)cc1"));
  CHECK(scaffold_of("CC1CCC(=O)N1") == canonicalize("O=C1CCCN1"));
  CHECK(scaffold_of("CC(=O)Nc1ccccc1") == canonicalize("c1ccccc1"));
  CHECK(scaffold_of("O=C(O)c1ccccc1") == canonicalize("c1ccccc1"));
}

TEST_CASE("registry loading") {
  const ScaffoldRegistry small = parse_registry(
      "scaffold_smiles,group_id,group_name\nc1ccccc1,1,benzenes\nc1ccncc1,1,benzenes\nC1CCCCC1,2,rings\n");
  CHECK(small.size() == 3);
  CHECK(small.group_count() == 2);
  CHECK(throws_code([] {
          parse_registry("scaffold_smiles,group_id,group_name\nc1ccccc1,1,a\nc1ccccc1,2,b\n");
        }, ErrorCode::kDuplicateScaffold));
  CHECK(throws_code([] { parse_registry("scaffold_smiles,group_id,group_name\nCc1ccccc1,1,a\n"); },
                    ErrorCode::kNonFixedPointScaffold));
  CHECK(throws_code([] { parse_registry("scaffold_smiles,group_id,group_name\nc1cc,1,a\n"); },
                    ErrorCode::kUnparseableScaffold));
  CHECK_THROWS_AS(parse_registry("scaffold_smiles,group_id,group_name\nc1ccccc1,1,a\nC1CC1,3,b\n"),
                  Error);
}

TEST_CASE("bundled registry has nine groups of fixed-point scaffolds") {
  const ScaffoldRegistry reg = load_registry(data_path("scaffold_registry.csv"));
  CHECK(reg.group_count() == 9);
  for (const auto &[scaffold, group] : reg.entries()) {
    CAPTURE(scaffold);
    if (scaffold.empty()) continue;
    CHECK(scaffold_of(scaffold) == scaffold);
    CHECK(group >= 1);
    CHECK(group <= 9);
  }
}

TEST_CASE("classify examples") {
  const ScaffoldRegistry reg = parse_registry("scaffold_smiles,group_id,group_name\nc1ccccc1,1,benzenes\n");
  CHECK(classify(parse_smiles("Cc1ccccc1"), reg).group == 1);
  CHECK_FALSE(classify(parse_smiles("CCCCCl"), reg).known());
  CHECK_FALSE(classify(parse_smiles("c1ccncc1"), reg).known());
}

TEST_CASE("every validation molecule has a registered scaffold") {
  const ScaffoldRegistry reg = load_registry(data_path("scaffold_registry.csv"));
  const Dataset ds = load_dataset(data_path("validation_additives.csv"));
  REQUIRE(ds.size() == 24);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CAPTURE(ds.records[i].smiles);
    CHECK(classify(ds.molecules[i], reg).known());
  }
  const auto groups = group_dataset(ds.molecules, reg);
  std::size_t total = 0;
  for (const auto &[g, rows] : groups) total += rows.size();
  CHECK(total == 24);
}

TEST_CASE("group_dataset partitions by group and names the first novel index") {
  const ScaffoldRegistry reg = parse_registry(
      "scaffold_smiles,group_id,group_name\nc1ccccc1,1,benzenes\nc1ccncc1,2,pyridines\n");
  std::vector<MolecularGraph> mols;
  for (const char *s : {"Cc1ccccc1", "Nc1ccncc1", "Oc1ccccc1", "c1ccncc1", "Clc1ccccc1"}) {
    mols.push_back(parse_smiles(s));
  }
  const auto groups = group_dataset(mols, reg);
  REQUIRE(groups.size() == 2);
  CHECK(groups.at(1) == std::vector<int>{0, 2, 4});
  CHECK(groups.at(2) == std::vector<int>{1, 3});
  CHECK(group_dataset({}, reg).empty());
  mols.push_back(parse_smiles("C1CCCCC1"));
  try {
    group_dataset(mols, reg);
    FAIL("novel scaffold accepted");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNovelScaffoldInDataset);
    CHECK(std::string(e.what()).find('5') != std::string::npos);
  }
}

TEST_CASE("property: scaffold extraction is a fixed point") {
  SplitMix64 rng(4242);
  for (int trial = 0; trial < 500; ++trial) {
    const MolecularGraph g = random_molecule(rng, 10);
    const Scaffold s = extract_scaffold(g);
    CAPTURE(canonical_smiles(g));
    if (s.empty()) continue;
    CHECK(scaffold_of(s.canonical) == s.canonical);
  }
}

TEST_CASE("property: grafted acyclic side chains never change the scaffold") {
  const ScaffoldRegistry reg = load_registry(data_path("scaffold_registry.csv"));
  std::vector<std::string> scaffolds;
  for (const auto &[scaffold, group] : reg.entries()) {
    if (!scaffold.empty()) scaffolds.push_back(scaffold);
  }
  SplitMix64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string &base = scaffolds[rng.uniform_index(scaffolds.size())];
    MolecularGraph g = parse_smiles(base);
    const int grafts = 1 + static_cast<int>(rng.uniform_index(3));
    for (int k = 0; k < grafts; ++k) g = graft_side_chain(g, rng);
    CAPTURE(canonical_smiles(g));
    CHECK(extract_scaffold(g).canonical == base);
    CHECK(classify(g, reg).group == reg.group_of(base));
  }
}

TEST_CASE("property: classify is invariant under SMILES rewriting") {
  const ScaffoldRegistry reg = load_registry(data_path("scaffold_registry.csv"));
  SplitMix64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const MolecularGraph g = random_molecule(rng, 8);
    const MolecularGraph again = parse_smiles(canonical_smiles(g));
    CHECK(classify(g, reg).group == classify(again, reg).group);
    CHECK(extract_scaffold(g) == extract_scaffold(again));
  }
}
