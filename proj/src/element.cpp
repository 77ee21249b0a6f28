// SPDX-License-Identifier: Apache-2.0

#include "copas/element.h"

#include <array>

namespace copas {
namespace {

constexpr int kV1[] = {1};
constexpr int kV3[] = {3};
constexpr int kV4[] = {4};
constexpr int kV2[] = {2};
constexpr int kV35[] = {3, 5};
constexpr int kV246[] = {2, 4, 6};
constexpr int kV1357[] = {1, 3, 5, 7};

// Masses are IUPAC conventional standard atomic weights rounded to 3 decimals.
const std::array<ElementInfo, kElementCount> kTable = {{
    {Element::kH, "H", 1, 1.008, false, false, kV1},
    {Element::kLi, "Li", 3, 6.941, false, false, kV1},
    {Element::kB, "B", 5, 10.811, true, true, kV3},
    {Element::kC, "C", 6, 12.011, true, true, kV4},
    {Element::kN, "N", 7, 14.007, true, true, kV35},
    {Element::kO, "O", 8, 15.999, true, true, kV2},
    {Element::kF, "F", 9, 18.998, true, false, kV1},
    {Element::kNa, "Na", 11, 22.990, false, false, kV1},
    {Element::kSi, "Si", 14, 28.086, false, false, kV4},
    {Element::kP, "P", 15, 30.974, true, true, kV35},
    {Element::kS, "S", 16, 32.065, true, true, kV246},
    {Element::kCl, "Cl", 17, 35.453, true, false, kV1357},
    {Element::kK, "K", 19, 39.098, false, false, kV1},
    {Element::kSe, "Se", 34, 78.971, false, true, kV246},
    {Element::kBr, "Br", 35, 79.904, true, false, kV1357},
    {Element::kI, "I", 53, 126.904, true, false, kV1357},
    {Element::kCs, "Cs", 55, 132.905, false, false, kV1},
}};

} // namespace

const ElementInfo &element_info(Element e) {
  return kTable[static_cast<std::size_t>(e)];
}

std::optional<Element> element_from_symbol(std::string_view symbol) {
  for (const auto &info : kTable) {
    if (info.symbol == symbol) return info.element;
  }
  return std::nullopt;
}

std::optional<Element> element_from_aromatic_symbol(std::string_view symbol) {
  if (symbol.empty()) return std::nullopt;
  for (const auto &info : kTable) {
    if (!info.aromatic_allowed || info.symbol.size() != symbol.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < symbol.size(); ++i) {
      char lower = info.symbol[i];
      if (lower >= 'A' && lower <= 'Z') lower = static_cast<char>(lower - 'A' + 'a');
      if (lower != symbol[i]) {
        match = false;
        break;
      }
    }
    if (match) return info.element;
  }
  return std::nullopt;
}

} // namespace copas
