// SPDX-License-Identifier: Apache-2.0
//
// Descriptor selection cascade: max normalization, a standard-deviation
// threshold, and Pearson-correlation redundancy pruning, fitted on training
// rows and replayed unchanged on new rows.

#ifndef COPAS_SELECTION_H_
#define COPAS_SELECTION_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "copas/features.h"

namespace copas {

inline constexpr double kDefaultVarianceThreshold = 0.2;
inline constexpr double kDefaultPccThreshold = 0.9;

struct SelectionThresholds {
  double variance = kDefaultVarianceThreshold;  // keep columns with std > this
  double pcc = kDefaultPccThreshold;            // link columns with |r| > this
};

double sample_std(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);

struct NormalizeResult {
  FeatureMatrix matrix;
  std::map<std::string, double> column_max;   // in-scope survivors
  std::vector<std::string> constant_columns;  // all-zero in-scope columns
};

// Divides each in-scope column by its maximum absolute value and removes
// in-scope columns that are identically zero.
NormalizeResult max_normalize(const FeatureMatrix &matrix, const std::set<Block> &scope);

// Indices of columns whose sample standard deviation exceeds `threshold`.
std::vector<std::size_t> variance_filter(const FeatureMatrix &matrix,
                                         std::span<const std::size_t> candidates,
                                         double threshold);

// Union-find over |pearson| > threshold; each component keeps its smallest
// index. Constant columns never link.
std::vector<std::size_t> pcc_prune(const FeatureMatrix &matrix,
                                   std::span<const std::size_t> candidates,
                                   double threshold);

class SelectionPipeline {
public:
  static SelectionPipeline fit(const FeatureMatrix &train, const SelectionThresholds &thresholds,
                               const std::set<Block> &scope = {Block::kDescriptors});

  // Reuses fitted maxima and survivors; values on unseen rows may exceed 1.
  FeatureMatrix apply(const FeatureMatrix &matrix) const;

  const std::vector<std::string> &fitted_columns() const { return fitted_columns_; }
  const std::vector<std::string> &kept_columns() const { return kept_columns_; }
  const std::map<std::string, double> &column_max() const { return column_max_; }
  const SelectionThresholds &thresholds() const { return thresholds_; }
  const std::set<Block> &scope() const { return scope_; }

  std::string to_json() const;
  static SelectionPipeline from_json(const std::string &text);

  friend bool operator==(const SelectionPipeline &a, const SelectionPipeline &b) {
    return a.fitted_columns_ == b.fitted_columns_ && a.kept_columns_ == b.kept_columns_ &&
           a.column_max_ == b.column_max_ && a.thresholds_.variance == b.thresholds_.variance &&
           a.thresholds_.pcc == b.thresholds_.pcc && a.scope_ == b.scope_;
  }

private:
  std::vector<std::string> fitted_columns_;
  std::vector<std::string> kept_columns_;
  std::map<std::string, double> column_max_;
  SelectionThresholds thresholds_;
  std::set<Block> scope_;
};

} // namespace copas

#endif // COPAS_SELECTION_H_
