// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "copas/csv.h"
#include "copas/dataset.h"
#include "copas/error.h"
#include "copas/features.h"
#include "support/generators.h"

using namespace copas;
using copas::testing::data_path;
using copas::testing::graft_side_chain;
using copas::testing::random_molecule;
using copas::testing::throws_code;

namespace {

PatternKey key_of(std::vector<PatternAtom> atoms, std::vector<PatternBond> bonds) {
  PatternKey k;
  k.name = "test";
  k.atoms = std::move(atoms);
  k.bonds = std::move(bonds);
  return k;
}

std::size_t key_index(const std::string &name) {
  const auto &keys = default_keyset().keys;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].name == name) return i;
  }
  FAIL("no key named " << name);
  return 0;
}

// Enumerates every injective atom map and counts distinct (atoms, bonds) images.
int brute_force_matches(const MolecularGraph &g, const PatternKey &p) {
  const std::size_t k = p.atoms.size();
  std::set<std::pair<std::vector<int>, std::vector<int>>> images;
  std::vector<int> map(k, -1);
  auto atom_ok = [&](std::size_t pi, int gi) {
    const PatternAtom &pa = p.atoms[pi];
    const Atom &a = g.atom(gi);
    return (!pa.element || *pa.element == a.element) && (!pa.aromatic || *pa.aromatic == a.aromatic);
  };
  auto recurse = [&](auto &&self, std::size_t depth) -> void {
    if (depth == k) {
      std::vector<int> bonds;
      for (const PatternBond &pb : p.bonds) {
        const auto b = g.bond_between(map[static_cast<std::size_t>(pb.a)],
                                      map[static_cast<std::size_t>(pb.b)]);
        if (!b || (pb.order && g.bond(*b).order != *pb.order)) return;
        bonds.push_back(*b);
      }
      std::vector<int> atoms(map);
      std::sort(atoms.begin(), atoms.end());
      std::sort(bonds.begin(), bonds.end());
      images.insert({atoms, bonds});
      return;
    }
    for (std::size_t gi = 0; gi < g.atom_count(); ++gi) {
      const int a = static_cast<int>(gi);
      if (std::find(map.begin(), map.begin() + static_cast<long>(depth), a) !=
          map.begin() + static_cast<long>(depth)) {
        continue;
      }
      if (!atom_ok(depth, a)) continue;
      map[depth] = a;
      self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  return static_cast<int>(images.size());
}

// Random connected pattern of 1-4 atoms over C/N/O/any with optional orders.
PatternKey random_pattern(SplitMix64 &rng) {
  static const std::vector<std::optional<Element>> kElements = {
      Element::kC, Element::kC, Element::kN, Element::kO, std::nullopt};
  static const std::vector<std::optional<BondOrder>> kOrders = {
      std::nullopt, BondOrder::kSingle, BondOrder::kDouble, BondOrder::kAromatic};
  PatternKey p;
  const std::size_t n = 1 + rng.uniform_index(4);
  for (std::size_t i = 0; i < n; ++i) {
    PatternAtom a;
    a.element = kElements[rng.uniform_index(kElements.size())];
    if (rng.uniform01() < 0.3) a.aromatic = rng.uniform01() < 0.5;
    p.atoms.push_back(a);
    if (i > 0) {
      p.bonds.push_back({static_cast<int>(rng.uniform_index(i)), static_cast<int>(i),
                         kOrders[rng.uniform_index(kOrders.size())]});
    }
  }
  return p;
}

} // namespace

TEST_CASE("pattern match examples") {
  const PatternKey carbonyl =
      key_of({{Element::kO, std::nullopt}, {Element::kC, std::nullopt}}, {{0, 1, BondOrder::kDouble}});
  CHECK(match_pattern(parse_smiles("CC(N)=O"), carbonyl) == 1);
  const PatternKey aromatic_n = key_of({{Element::kN, true}}, {});
  CHECK(match_pattern(parse_smiles("Nc1ccncc1"), aromatic_n) == 1);
  const PatternKey ss = key_of({{Element::kS, std::nullopt}, {Element::kS, std::nullopt}}, {{0, 1, std::nullopt}});
  CHECK(match_pattern(parse_smiles("C"), ss) == 0);
  // A symmetric pattern counts each image once.
  const PatternKey cc = key_of({{Element::kC, std::nullopt}, {Element::kC, std::nullopt}}, {{0, 1, std::nullopt}});
  CHECK(match_pattern(parse_smiles("CCC"), cc) == 2);
  CHECK(match_pattern(parse_smiles("c1ccccc1"), cc) == 6);
}

TEST_CASE("pattern errors") {
  PatternKey big;
  for (int i = 0; i < 9; ++i) {
    big.atoms.push_back({Element::kC, std::nullopt});
    if (i > 0) big.bonds.push_back({i - 1, i, std::nullopt});
  }
  CHECK(throws_code([&] { match_pattern(parse_smiles("CCCCCCCCCC"), big); }, ErrorCode::kPatternTooLarge));
  const PatternKey split = key_of({{Element::kC, std::nullopt}, {Element::kC, std::nullopt}}, {});
  CHECK(throws_code([&] { match_pattern(parse_smiles("CC"), split); }, ErrorCode::kInvalidPattern));
}

TEST_CASE("property: match counts agree with exhaustive enumeration") {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const MolecularGraph g = random_molecule(rng, 6);
    const PatternKey p = random_pattern(rng);
    CAPTURE(canonical_smiles(g));
    CHECK(match_pattern(g, p) == brute_force_matches(g, p));
  }
}

TEST_CASE("fingerprint examples") {
  const auto benzene = fingerprint(parse_smiles("c1ccccc1"), default_keyset());
  REQUIRE(benzene.size() == 64);
  CHECK(benzene[key_index("aromatic_6_ring")] == 1);
  CHECK(benzene[key_index("has_S")] == 0);
  const auto methane = fingerprint(parse_smiles("C"), default_keyset());
  for (std::size_t i = 0; i < methane.size(); ++i) {
    CAPTURE(default_keyset().keys[i].name);
    CHECK(methane[i] == (i == key_index("has_C") ? 1 : 0));
  }
  CHECK(fingerprint(parse_smiles("CC(N)=O"), default_keyset()) ==
        fingerprint(parse_smiles("NC(C)=O"), default_keyset()));
}

TEST_CASE("bundled key set file matches the built-in set") {
  const KeySet file = load_keyset(data_path("keys64.json"));
  REQUIRE(file.size() == default_keyset().size());
  CHECK(keyset_to_json(file) == keyset_to_json(default_keyset()));
  CHECK(read_text_file(data_path("keys64.json")) == keyset_to_json(default_keyset()));
}

TEST_CASE("property: adding atoms never clears a fingerprint bit") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const MolecularGraph g = random_molecule(rng, 6);
    const MolecularGraph bigger = graft_side_chain(g, rng);
    const auto before = fingerprint(g, default_keyset());
    const auto after = fingerprint(bigger, default_keyset());
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] >= before[i]);
  }
}

TEST_CASE("descriptor examples") {
  const DescriptorVector acetamide = descriptors(parse_smiles("CC(N)=O"));
  CHECK(acetamide["heavy_atom_count"] == 4);
  CHECK(acetamide["hba_count"] == 2);
  CHECK(acetamide["hbd_count"] == 1);
  // C2H5NO: 2 * 12.011 + 5 * 1.008 + 14.007 + 15.999.
  CHECK(acetamide["molecular_weight"] == doctest::Approx(59.068).epsilon(1e-4));
  const DescriptorVector thiazole = descriptors(parse_smiles("OC(=O)c1csc(Cl)n1"));
  CHECK(thiazole["hba_count"] == 3);
  CHECK(thiazole["halogen_count"] == 1);
  CHECK(thiazole["ring_count"] == 1);
  CHECK(thiazole["aromatic_ring_count"] == 1);
  const DescriptorVector methane = descriptors(parse_smiles("C"));
  CHECK(methane["ring_count"] == 0);
  CHECK(methane["fraction_aromatic_atoms"] == 0);
  CHECK(descriptors(parse_smiles("CCCC"))["rotatable_bonds"] == 1);
  CHECK(descriptors(parse_smiles("[Na+].[Cl-]"))["component_count"] == 2);
  CHECK(descriptors(parse_smiles("[Na+].[Cl-]"))["net_formal_charge"] == 0);
  CHECK(throws_code([&] { (void)methane["no_such_descriptor"]; }, ErrorCode::kUnknownColumn));
}

TEST_CASE("property: descriptor invariants and spelling independence") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const MolecularGraph g = random_molecule(rng, 8);
    const DescriptorVector d = descriptors(g);
    for (double v : d.values) CHECK(v >= 0);
    CHECK(d["fraction_aromatic_atoms"] <= 1.0);
    CHECK(d["hbd_count"] <= d["count_N"] + d["count_O"]);
    const MolecularGraph again = copas::testing::permute_atoms(g, rng);
    CHECK(descriptors(again).values == d.values);
    CHECK(fingerprint(again, default_keyset()) == fingerprint(g, default_keyset()));
  }
}

TEST_CASE("latent table loading") {
  std::string three = "smiles";
  for (int i = 1; i <= 56; ++i) three += ",z" + std::to_string(i);
  three += "\n";
  for (const char *s : {"CCO", "c1ccccc1", "CC(N)=O"}) {
    three += s;
    for (int i = 0; i < 56; ++i) three += ",0.5";
    three += "\n";
  }
  const LatentTable t = parse_latents(three);
  CHECK(t.size() == 3);
  CHECK(t.dimension == 56);
  REQUIRE(t.find(canonicalize("OCC")) != nullptr);
  CHECK(t.find(canonicalize("OCC"))->size() == 56);

  CHECK(throws_code([] { parse_latents("smiles,z1,z2\nCCO,1,2\nCCN,1\n"); }, ErrorCode::kDimensionMismatch));
  CHECK(throws_code([] { parse_latents("smiles,z1\nC1CC,1\n"); }, ErrorCode::kUnparseableSmiles));
  CHECK(throws_code([] { parse_latents("smiles,z1\nCCO,1\nOCC,2\n"); }, ErrorCode::kDuplicateKey));
  CHECK(parse_latents("").size() == 0);
}

TEST_CASE("assembly order, widths and missing latents") {
  const Dataset ds = load_dataset(data_path("validation_additives.csv"));
  const FeatureMatrix d = assemble(ds.molecules, {Block::kDescriptors}, {});
  CHECK(d.rows() == 24);
  CHECK(d.cols() == 24);
  const FeatureMatrix kd = assemble(ds.molecules, parse_blocks("K+D"), {});
  CHECK(kd.cols() == 88);
  CHECK(kd.columns.front().block == Block::kKeys);
  CHECK(kd.columns.back().block == Block::kDescriptors);

  LatentTable latents;
  latents.dimension = 2;
  for (std::size_t i = 0; i + 1 < ds.size(); ++i) latents.vectors[ds.records[i].canonical] = {1.0, 2.0};
  FeatureSources sources;
  sources.latents = &latents;
  CHECK(throws_code([&] { assemble(ds.molecules, {Block::kLatent}, sources); }, ErrorCode::kMissingLatent));
  latents.vectors[ds.records.back().canonical] = {3.0, 4.0};
  const FeatureMatrix zd = assemble(ds.molecules, parse_blocks("Z+D"), sources);
  REQUIRE(zd.cols() == 26);
  CHECK(zd.columns[23].block == Block::kDescriptors);
  CHECK(zd.columns[24].block == Block::kLatent);
  CHECK(zd.values.back()[25] == 4.0);
  CHECK(blocks_to_string(parse_blocks("DZK")) == blocks_to_string(parse_blocks("K+D+Z")));

  std::set<std::string> names;
  for (const auto &c : kd.columns) names.insert(c.name);
  CHECK(names.size() == kd.cols());
}

TEST_CASE("external fingerprints replace the native key block") {
  ExternalFingerprints fps = parse_external_fingerprints("smiles,bit0,bit1\nCCO,1,0\nc1ccccc1,0,1\n");
  FeatureSources sources;
  sources.external_keys = &fps;
  const FeatureMatrix m =
      assemble({parse_smiles("OCC"), parse_smiles("c1ccccc1")}, {Block::kKeys}, sources);
  REQUIRE(m.cols() == 2);
  CHECK(m.values[0] == std::vector<double>{1, 0});
  CHECK(m.values[1] == std::vector<double>{0, 1});
}
