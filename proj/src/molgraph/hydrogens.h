// SPDX-License-Identifier: Apache-2.0

#ifndef COPAS_SRC_MOLGRAPH_HYDROGENS_H_
#define COPAS_SRC_MOLGRAPH_HYDROGENS_H_

#include <optional>
#include <span>

#include "copas/molgraph.h"

namespace copas::internal {

// Hydrogen count the atom would carry if written without brackets, given its
// bond orders. nullopt when no allowed valence fits.
std::optional<int> organic_hydrogens(const Atom &atom,
                                     std::span<const BondOrder> orders);

// Upper valence bound for a bracket atom: max neutral valence + |charge|.
bool bracket_valence_ok(const Atom &atom, std::span<const BondOrder> orders);

} // namespace copas::internal

#endif // COPAS_SRC_MOLGRAPH_HYDROGENS_H_
