// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copas/error.h"
#include "copas/molgraph.h"

namespace copas {
namespace {

struct RingOpening {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string_view text) : text_(text) {}

  MolecularGraph parse() {
    if (text_.empty()) throw ParseError(ErrorCode::kEmptyInput, 0, "empty SMILES");
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev_ < 0) fail(ErrorCode::kUnbalancedParenthesis, "branch without a preceding atom");
        if (pending_) fail(ErrorCode::kInvalidSyntax, "bond symbol before branch");
        branches_.push_back({prev_, pos_});
        ++pos_;
      } else if (c == ')') {
        if (branches_.empty()) fail(ErrorCode::kUnbalancedParenthesis, "unmatched ')'");
        if (pending_) fail(ErrorCode::kInvalidSyntax, "dangling bond symbol");
        prev_ = branches_.back().first;
        branches_.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending_) fail(ErrorCode::kInvalidSyntax, "bond symbol before '.'");
        if (prev_ < 0) fail(ErrorCode::kInvalidSyntax, "'.' without a preceding atom");
        prev_ = -1;
        ++pos_;
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
        if (pending_) fail(ErrorCode::kInvalidSyntax, "two consecutive bond symbols");
        pending_offset_ = pos_;
        switch (c) {
        case '=': pending_ = BondOrder::kDouble; break;
        case '#': pending_ = BondOrder::kTriple; break;
        case ':': pending_ = BondOrder::kAromatic; break;
        default: pending_ = BondOrder::kSingle; break;  // '-', '/', '\\'
        }
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ring_closure();
      } else if (c == '[') {
        add_atom(bracket_atom());
      } else {
        add_atom(organic_atom());
      }
    }
    if (!branches_.empty()) {
      pos_ = branches_.back().second;
      fail(ErrorCode::kUnbalancedParenthesis, "unclosed '('");
    }
    if (!rings_.empty()) {
      pos_ = rings_.begin()->second.offset;
      fail(ErrorCode::kUnclosedRingBond,
           "ring bond " + std::to_string(rings_.begin()->first) + " never closed");
    }
    if (pending_) {
      pos_ = pending_offset_;
      fail(ErrorCode::kInvalidSyntax, "dangling bond symbol");
    }
    int bad_atom = -1;
    try {
      return MolecularGraph::build(std::move(atoms_), std::move(bonds_),
                                   std::string(text_), &bad_atom);
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      const std::size_t offset =
          bad_atom >= 0 ? atom_offsets_[static_cast<std::size_t>(bad_atom)] : 0;
      throw ParseError(e.code(), offset, e.what());
    }
  }

private:
  [[noreturn]] void fail(ErrorCode code, const std::string &message) const {
    throw ParseError(code, pos_, message);
  }

  Atom organic_atom() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    Atom atom;
    // Two-letter organic symbols first.
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      atom.element = Element::kCl;
      pos_ += 2;
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      atom.element = Element::kBr;
      pos_ += 2;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      auto e = element_from_symbol(std::string_view(&text_[pos_], 1));
      if (!e || !element_info(*e).organic_subset) {
        fail(ErrorCode::kUnknownElement,
             "'" + std::string(1, c) + "' is not an organic-subset element");
      }
      atom.element = *e;
      ++pos_;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      auto e = element_from_aromatic_symbol(std::string_view(&text_[pos_], 1));
      if (!e || !element_info(*e).organic_subset) {
        fail(ErrorCode::kUnknownElement,
             "'" + std::string(1, c) + "' is not an aromatic organic-subset element");
      }
      atom.element = *e;
      atom.aromatic = true;
      ++pos_;
    } else {
      fail(ErrorCode::kInvalidSyntax, "unexpected character '" + std::string(1, c) + "'");
    }
    current_atom_offset_ = start;
    return atom;
  }

  int read_int() {
    int value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    return value;
  }

  Atom bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    Atom atom;
    atom.bracket = true;
    atom.isotope = read_int();
    if (pos_ >= text_.size()) fail(ErrorCode::kInvalidSyntax, "unterminated bracket atom");

    // Element symbol: try two characters, then one.
    std::optional<Element> element;
    bool aromatic = false;
    for (std::size_t len : {std::size_t{2}, std::size_t{1}}) {
      if (pos_ + len > text_.size()) continue;
      const std::string_view sym = text_.substr(pos_, len);
      if (std::isupper(static_cast<unsigned char>(sym[0]))) {
        const bool two_letter = pos_ + 1 < text_.size() &&
                                std::islower(static_cast<unsigned char>(text_[pos_ + 1]));
        if (two_letter != (len == 2)) continue;
        element = element_from_symbol(sym);
      } else {
        element = element_from_aromatic_symbol(sym);
        aromatic = element.has_value();
      }
      if (element) {
        pos_ += len;
        break;
      }
    }
    if (!element) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
      fail(ErrorCode::kUnknownElement,
           "unknown element '" + std::string(text_.substr(pos_, end - pos_)) + "'");
    }
    atom.element = *element;
    atom.aromatic = aromatic;

    while (pos_ < text_.size() && text_[pos_] == '@') ++pos_;  // chirality
    if (pos_ + 1 < text_.size() &&
        (text_.substr(pos_, 2) == "TH" || text_.substr(pos_, 2) == "AL" ||
         text_.substr(pos_, 2) == "SP" || text_.substr(pos_, 2) == "TB" ||
         text_.substr(pos_, 2) == "OH") &&
        text_[pos_ - 1] == '@') {
      pos_ += 2;
      read_int();
    }
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      atom.explicit_h = 1;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        atom.explicit_h = read_int();
      }
    }
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      int magnitude = 0;
      while (pos_ < text_.size() && text_[pos_] == sign) {
        ++magnitude;
        ++pos_;
      }
      if (magnitude == 1 && pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        magnitude = read_int();
      }
      atom.formal_charge = sign == '+' ? magnitude : -magnitude;
    }
    if (pos_ < text_.size() && text_[pos_] == ':') {  // atom class
      ++pos_;
      read_int();
    }
    if (pos_ >= text_.size() || text_[pos_] != ']') {
      fail(ErrorCode::kInvalidSyntax, "malformed bracket atom");
    }
    ++pos_;
    current_atom_offset_ = start;
    return atom;
  }

  BondOrder implicit_order(int a, int b) const {
    return atoms_[static_cast<std::size_t>(a)].aromatic &&
                   atoms_[static_cast<std::size_t>(b)].aromatic
               ? BondOrder::kAromatic
               : BondOrder::kSingle;
  }

  void add_atom(const Atom &atom) {
    const int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(atom);
    atom_offsets_.push_back(current_atom_offset_);
    if (prev_ >= 0) {
      bonds_.push_back({prev_, idx, pending_.value_or(implicit_order(prev_, idx))});
    } else if (pending_) {
      pos_ = pending_offset_;
      fail(ErrorCode::kInvalidSyntax, "bond symbol without a preceding atom");
    }
    pending_.reset();
    prev_ = idx;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) fail(ErrorCode::kInvalidSyntax, "ring bond without a preceding atom");
    int number = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
        fail(ErrorCode::kInvalidSyntax, "'%' must be followed by two digits");
      }
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_[number] = {prev_, pending_, start};
      pending_.reset();
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == prev_) {
      pos_ = start;
      fail(ErrorCode::kInvalidSyntax, "ring bond closes on its own atom");
    }
    if (open.order && pending_ && *open.order != *pending_) {
      pos_ = start;
      fail(ErrorCode::kInvalidSyntax, "conflicting ring-bond orders");
    }
    for (const Bond &b : bonds_) {
      if ((b.begin == open.atom && b.end == prev_) || (b.begin == prev_ && b.end == open.atom)) {
        pos_ = start;
        fail(ErrorCode::kInvalidSyntax, "ring bond duplicates an existing bond");
      }
    }
    const BondOrder order = pending_ ? *pending_
                            : open.order ? *open.order
                                         : implicit_order(open.atom, prev_);
    bonds_.push_back({open.atom, prev_, order});
    pending_.reset();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<BondOrder> pending_;
  std::size_t pending_offset_ = 0;
  std::size_t current_atom_offset_ = 0;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::map<int, RingOpening> rings_;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::size_t> atom_offsets_;
};

} // namespace

MolecularGraph parse_smiles(std::string_view text) {
  return SmilesParser(text).parse();
}

} // namespace copas
