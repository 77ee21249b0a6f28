// SPDX-License-Identifier: Apache-2.0

#ifndef COPAS_SRC_MODELS_COMMON_H_
#define COPAS_SRC_MODELS_COMMON_H_

#include <span>

#include "copas/models.h"

namespace copas::internal {

// Throws EmptyTrainingSet, LengthMismatch, WidthMismatch or NonFiniteTarget.
void check_training_set(const Rows &x, std::span<const double> y);

void check_width(std::size_t expected, std::size_t got);

} // namespace copas::internal

#endif // COPAS_SRC_MODELS_COMMON_H_
