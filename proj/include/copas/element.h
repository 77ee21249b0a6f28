// SPDX-License-Identifier: Apache-2.0

#ifndef COPAS_ELEMENT_H_
#define COPAS_ELEMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace copas {

enum class Element : std::uint8_t {
  kH, kLi, kB, kC, kN, kO, kF, kNa, kSi, kP, kS, kCl, kK, kSe, kBr, kI, kCs,
};

inline constexpr int kElementCount = 17;

struct ElementInfo {
  Element element;
  std::string_view symbol;
  int atomic_number;
  double mass;            // standard atomic weight, 3 decimals
  bool organic_subset;    // may appear outside brackets
  bool aromatic_allowed;  // may appear as a lowercase aromatic atom
  std::span<const int> valences;  // ascending allowed neutral valences
};

const ElementInfo &element_info(Element e);

std::optional<Element> element_from_symbol(std::string_view symbol);

// Lowercase aromatic spelling ("c", "se"), or nullopt.
std::optional<Element> element_from_aromatic_symbol(std::string_view symbol);

inline bool is_halogen(Element e) {
  return e == Element::kF || e == Element::kCl || e == Element::kBr ||
         e == Element::kI;
}

} // namespace copas

#endif // COPAS_ELEMENT_H_
