// SPDX-License-Identifier: Apache-2.0
//
// Error reporting shared by every copas module.

#ifndef COPAS_ERROR_H_
#define COPAS_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace copas {

enum class ErrorCode {
  // molgraph
  kEmptyInput,
  kUnbalancedParenthesis,
  kUnclosedRingBond,
  kUnknownElement,
  kValenceViolation,
  kInvalidSyntax,
  kNonRingAromatic,
  // scaffold
  kDuplicateScaffold,
  kNonFixedPointScaffold,
  kUnparseableScaffold,
  kNovelScaffoldInDataset,
  // features
  kPatternTooLarge,
  kInvalidPattern,
  kDimensionMismatch,
  kUnparseableSmiles,
  kDuplicateKey,
  kMissingLatent,
  // selection
  kEmptyMatrix,
  kTooFewSamples,
  kConstantVector,
  kLengthMismatch,
  kUnknownColumn,
  // models
  kEmptyTrainingSet,
  kNonFiniteTarget,
  kWidthMismatch,
  kInvalidModel,
  // evaluation
  kEmptyGroup,
  kDegenerateSplit,
  kSingleGroup,
  kEmpty,
  // io / cli
  kIoError,
  kFormatError,
  kInvalidDataset,
  kDuplicateMolecule,
  kInvalidConfig,
  kUsage,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// SMILES syntax and chemistry errors carry the byte offset in the source text.
class ParseError : public Error {
public:
  ParseError(ErrorCode code, std::size_t offset, const std::string &message);

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

} // namespace copas

#endif // COPAS_ERROR_H_
