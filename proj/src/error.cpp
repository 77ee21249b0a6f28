// SPDX-License-Identifier: Apache-2.0

#include "copas/error.h"

namespace copas {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::kEmptyInput: return "EmptyInput";
  case ErrorCode::kUnbalancedParenthesis: return "UnbalancedParenthesis";
  case ErrorCode::kUnclosedRingBond: return "UnclosedRingBond";
  case ErrorCode::kUnknownElement: return "UnknownElement";
  case ErrorCode::kValenceViolation: return "ValenceViolation";
  case ErrorCode::kInvalidSyntax: return "InvalidSyntax";
  case ErrorCode::kNonRingAromatic: return "NonRingAromatic";
  case ErrorCode::kDuplicateScaffold: return "DuplicateScaffold";
  case ErrorCode::kNonFixedPointScaffold: return "NonFixedPointScaffold";
  case ErrorCode::kUnparseableScaffold: return "UnparseableScaffold";
  case ErrorCode::kNovelScaffoldInDataset: return "NovelScaffoldInDataset";
  case ErrorCode::kPatternTooLarge: return "PatternTooLarge";
  case ErrorCode::kInvalidPattern: return "InvalidPattern";
  case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
  case ErrorCode::kUnparseableSmiles: return "UnparseableSMILES";
  case ErrorCode::kDuplicateKey: return "DuplicateKey";
  case ErrorCode::kMissingLatent: return "MissingLatent";
  case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
  case ErrorCode::kTooFewSamples: return "TooFewSamples";
  case ErrorCode::kConstantVector: return "ConstantVector";
  case ErrorCode::kLengthMismatch: return "LengthMismatch";
  case ErrorCode::kUnknownColumn: return "UnknownColumn";
  case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
  case ErrorCode::kNonFiniteTarget: return "NonFiniteTarget";
  case ErrorCode::kWidthMismatch: return "WidthMismatch";
  case ErrorCode::kInvalidModel: return "InvalidModel";
  case ErrorCode::kEmptyGroup: return "EmptyGroup";
  case ErrorCode::kDegenerateSplit: return "DegenerateSplit";
  case ErrorCode::kSingleGroup: return "SingleGroup";
  case ErrorCode::kEmpty: return "Empty";
  case ErrorCode::kIoError: return "IoError";
  case ErrorCode::kFormatError: return "FormatError";
  case ErrorCode::kInvalidDataset: return "InvalidDataset";
  case ErrorCode::kDuplicateMolecule: return "DuplicateMolecule";
  case ErrorCode::kInvalidConfig: return "InvalidConfig";
  case ErrorCode::kUsage: return "Usage";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

ParseError::ParseError(ErrorCode code, std::size_t offset,
                       const std::string &message)
    : Error(code, message + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

} // namespace copas
