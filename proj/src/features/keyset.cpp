// SPDX-License-Identifier: Apache-2.0
//
// The native 64-key structural key set and its JSON form.
//
// Keys are written in a compact notation: atoms are comma separated, where
// "C" is carbon of either aromaticity, "c" aromatic carbon, "C_" aliphatic
// carbon, "*" any atom and "a" any aromatic atom. Bonds are "i-j" single,
// "i=j" double, "i#j" triple, "i:j" aromatic and "i~j" any order.

#include <cctype>
#include <sstream>

#include <json.hpp>

#include "copas/csv.h"
#include "copas/error.h"
#include "copas/features.h"

namespace copas {
namespace {

PatternAtom parse_atom_token(std::string_view tok) {
  PatternAtom atom;
  if (tok == "*") return atom;
  if (tok == "a") {
    atom.aromatic = true;
    return atom;
  }
  if (tok.size() >= 2 && tok.back() == '_') {
    atom.element = element_from_symbol(tok.substr(0, tok.size() - 1));
    atom.aromatic = false;
  } else if (std::islower(static_cast<unsigned char>(tok[0]))) {
    atom.element = element_from_aromatic_symbol(tok);
    atom.aromatic = true;
  } else {
    atom.element = element_from_symbol(tok);
  }
  if (!atom.element) throw Error(ErrorCode::kInvalidPattern, "bad atom token '" + std::string(tok) + "'");
  return atom;
}

PatternKey make_key(int id, std::string name, std::string_view atoms, std::string_view bonds,
                    int min_count = 1) {
  PatternKey key;
  key.id = id;
  key.name = std::move(name);
  key.min_count = min_count;
  std::size_t pos = 0;
  while (pos <= atoms.size()) {
    std::size_t end = atoms.find(',', pos);
    if (end == std::string_view::npos) end = atoms.size();
    key.atoms.push_back(parse_atom_token(atoms.substr(pos, end - pos)));
    pos = end + 1;
  }
  pos = 0;
  while (pos < bonds.size()) {
    std::size_t end = bonds.find(',', pos);
    if (end == std::string_view::npos) end = bonds.size();
    const std::string_view tok = bonds.substr(pos, end - pos);
    const std::size_t sep = tok.find_first_of("-=#:~");
    PatternBond b;
    b.a = std::stoi(std::string(tok.substr(0, sep)));
    b.b = std::stoi(std::string(tok.substr(sep + 1)));
    switch (tok[sep]) {
    case '-': b.order = BondOrder::kSingle; break;
    case '=': b.order = BondOrder::kDouble; break;
    case '#': b.order = BondOrder::kTriple; break;
    case ':': b.order = BondOrder::kAromatic; break;
    default: break;
    }
    key.bonds.push_back(b);
    pos = end + 1;
  }
  return key;
}

KeySet build_default() {
  KeySet ks;
  ks.name = "native64";
  int id = 0;
  auto add = [&](std::string name, std::string_view atoms, std::string_view bonds = "",
                 int min_count = 1) {
    ks.keys.push_back(make_key(id++, std::move(name), atoms, bonds, min_count));
  };
  // element presence
  add("has_C", "C");
  add("has_N", "N");
  add("has_O", "O");
  add("has_S", "S");
  add("has_P", "P");
  add("has_F", "F");
  add("has_Cl", "Cl");
  add("has_Br", "Br");
  add("has_I", "I");
  add("has_B", "B");
  add("has_Si", "Si");
  add("has_Se", "Se");
  // element counts
  add("N_ge2", "N", "", 2);
  add("O_ge2", "O", "", 2);
  add("O_ge3", "O", "", 3);
  add("O_ge4", "O", "", 4);
  add("S_ge2", "S", "", 2);
  add("F_ge2", "F", "", 2);
  add("F_ge3", "F", "", 3);
  add("Cl_ge2", "Cl", "", 2);
  add("C_ge6", "C", "", 6);
  add("C_ge10", "C", "", 10);
  // aromatic atoms
  add("aromatic_c", "c");
  add("aromatic_n", "n");
  add("aromatic_o", "o");
  add("aromatic_s", "s");
  add("aromatic_ge6", "a", "", 6);
  // bonds
  add("C=O", "C,O", "0=1");
  add("C=N", "C,N", "0=1");
  add("C#N", "C,N", "0#1");
  add("C=C", "C,C", "0=1");
  add("C=S", "C,S", "0=1");
  add("S=O", "S,O", "0=1");
  add("P=O", "P,O", "0=1");
  add("N=O", "N,O", "0=1");
  add("C#C", "C,C", "0#1");
  add("C-N", "C,N", "0-1");
  add("C-O", "C,O", "0-1");
  add("C-S", "C,S", "0-1");
  add("N-N", "N,N", "0-1");
  add("C-F", "C,F", "0-1");
  add("C-Cl", "C,Cl", "0-1");
  // functional groups
  add("O=C-O", "C,O,O", "0=1,0-2");
  add("O=C-N", "C,O,N", "0=1,0-2");
  add("O=C-O_ge2", "C,O,O", "0=1,0-2", 2);
  add("S=C-N", "C,S,N", "0=1,0-2");
  add("N-C-C-O", "N,C_,C_,O", "0-1,1-2,2-3");
  add("c-C=O", "c,C_,O", "0-1,1=2");
  add("c-N", "c,N_", "0-1");
  add("c-O", "c,O_", "0-1");
  add("c-F", "c,F", "0-1");
  add("c-Cl", "c,Cl", "0-1");
  add("CF3", "C,F,F,F", "0-1,0-2,0-3");
  add("P(=O)(O)O", "P,O,O,O", "0=1,0-2,0-3");
  add("S-C-C-S", "S,C,C,S", "0-1,1-2,2-3");
  // rings
  add("aromatic_6_ring", "a,a,a,a,a,a", "0:1,1:2,2:3,3:4,4:5,5:0");
  add("aromatic_5_ring", "a,a,a,a,a", "0:1,1:2,2:3,3:4,4:0");
  add("any_6_ring", "*,*,*,*,*,*", "0~1,1~2,2~3,3~4,4~5,5~0");
  add("any_5_ring", "*,*,*,*,*", "0~1,1~2,2~3,3~4,4~0");
  add("aromatic_6_ring_ge2", "a,a,a,a,a,a", "0:1,1:2,2:3,3:4,4:5,5:0", 2);
  add("pyridine_like", "n,c,c,c,c,c", "0:1,1:2,2:3,3:4,4:5,5:0");
  add("thiophene_like", "s,c,c,c,c", "0:1,1:2,2:3,3:4,4:0");
  add("C=C-C=O", "C,C,C,O", "0=1,1-2,2=3");
  add("c-C-N", "c,C_,N", "0-1,1-2");
  return ks;
}

std::string order_name(const std::optional<BondOrder> &order) {
  if (!order) return "*";
  switch (*order) {
  case BondOrder::kSingle: return "single";
  case BondOrder::kDouble: return "double";
  case BondOrder::kTriple: return "triple";
  case BondOrder::kAromatic: return "aromatic";
  }
  return "*";
}

std::optional<BondOrder> order_from_name(const std::string &s) {
  if (s == "*") return std::nullopt;
  if (s == "single") return BondOrder::kSingle;
  if (s == "double") return BondOrder::kDouble;
  if (s == "triple") return BondOrder::kTriple;
  if (s == "aromatic") return BondOrder::kAromatic;
  throw Error(ErrorCode::kInvalidPattern, "unknown bond order '" + s + "'");
}

} // namespace

const KeySet &default_keyset() {
  static const KeySet keyset = build_default();
  return keyset;
}

KeySet parse_keyset_json(std::string_view json_text, std::string name) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kFormatError, std::string("key set JSON: ") + e.what());
  }
  KeySet ks;
  ks.name = std::move(name);
  const json *keys = &doc;
  if (doc.is_object()) {
    if (doc.contains("name")) ks.name = doc.at("name").get<std::string>();
    keys = &doc.at("keys");
  }
  if (!keys->is_array()) throw Error(ErrorCode::kFormatError, "key set must be a JSON list");
  std::set<int> ids;
  try {
    for (const json &k : *keys) {
      PatternKey key;
      key.id = k.at("id").get<int>();
      key.name = k.value("name", std::string());
      key.min_count = k.value("min_count", 1);
      for (const json &a : k.at("atoms")) {
        PatternAtom atom;
        const std::string el = a.value("element", std::string("*"));
        if (el != "*") {
          atom.element = element_from_symbol(el);
          if (!atom.element) throw Error(ErrorCode::kInvalidPattern, "unknown element '" + el + "'");
        }
        if (a.contains("aromatic") && a.at("aromatic").is_boolean()) {
          atom.aromatic = a.at("aromatic").get<bool>();
        }
        key.atoms.push_back(atom);
      }
      if (k.contains("bonds")) {
        for (const json &b : k.at("bonds")) {
          key.bonds.push_back({b.at("a").get<int>(), b.at("b").get<int>(),
                               order_from_name(b.value("order", std::string("*")))});
        }
      }
      if (!ids.insert(key.id).second) {
        throw Error(ErrorCode::kInvalidPattern, "duplicate key id " + std::to_string(key.id));
      }
      if (key.atoms.size() > kMaxPatternAtoms) {
        throw Error(ErrorCode::kPatternTooLarge, "key " + std::to_string(key.id) + " exceeds 8 atoms");
      }
      ks.keys.push_back(std::move(key));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kFormatError, std::string("key set JSON: ") + e.what());
  }
  return ks;
}

KeySet load_keyset(const std::filesystem::path &path) {
  return parse_keyset_json(read_text_file(path), path.stem().string());
}

std::string keyset_to_json(const KeySet &keyset) {
  using nlohmann::ordered_json;
  ordered_json keys = ordered_json::array();
  for (const PatternKey &k : keyset.keys) {
    ordered_json atoms = ordered_json::array();
    for (const PatternAtom &a : k.atoms) {
      ordered_json ja;
      ja["element"] = a.element ? std::string(element_info(*a.element).symbol) : "*";
      if (a.aromatic) {
        ja["aromatic"] = *a.aromatic;
      } else {
        ja["aromatic"] = "*";
      }
      atoms.push_back(ja);
    }
    ordered_json bonds = ordered_json::array();
    for (const PatternBond &b : k.bonds) {
      bonds.push_back({{"a", b.a}, {"b", b.b}, {"order", order_name(b.order)}});
    }
    ordered_json jk;
    jk["id"] = k.id;
    jk["name"] = k.name;
    jk["atoms"] = atoms;
    jk["bonds"] = bonds;
    jk["min_count"] = k.min_count;
    keys.push_back(jk);
  }
  return keys.dump(1) + "\n";
}

} // namespace copas
