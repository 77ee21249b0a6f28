// SPDX-License-Identifier: Apache-2.0

#include "copas/selection.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "copas/error.h"

namespace copas {
namespace {

std::vector<double> column_values(const FeatureMatrix &m, std::size_t c) {
  std::vector<double> v(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m.values[r][c];
  return v;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;  // root is always the smaller index
  }

private:
  std::vector<std::size_t> parent_;
};

} // namespace

double sample_std(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "sample standard deviation needs n >= 2, got " +
                                               std::to_string(values.size()));
  }
  const double mu = mean_of(values);
  double ss = 0.0;
  for (double x : values) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorCode::kTooFewSamples, "pearson needs n >= 2");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kConstantVector, "pearson of a constant vector");
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, -1.0, 1.0);
}

NormalizeResult max_normalize(const FeatureMatrix &matrix, const std::set<Block> &scope) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw Error(ErrorCode::kEmptyMatrix, "cannot normalize an empty matrix");
  }
  NormalizeResult out;
  std::vector<std::size_t> keep;
  std::vector<double> divisor;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    if (!scope.count(matrix.columns[c].block)) {
      keep.push_back(c);
      divisor.push_back(1.0);
      continue;
    }
    double mx = 0.0;
    for (std::size_t r = 0; r < matrix.rows(); ++r) mx = std::max(mx, std::abs(matrix.values[r][c]));
    if (mx == 0.0) {
      out.constant_columns.push_back(matrix.columns[c].name);
      continue;
    }
    keep.push_back(c);
    divisor.push_back(mx);
    out.column_max[matrix.columns[c].name] = mx;
  }
  out.matrix.row_ids = matrix.row_ids;
  for (std::size_t c : keep) out.matrix.columns.push_back(matrix.columns[c]);
  out.matrix.values.resize(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    auto &row = out.matrix.values[r];
    row.reserve(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) row.push_back(matrix.values[r][keep[k]] / divisor[k]);
  }
  return out;
}

std::vector<std::size_t> variance_filter(const FeatureMatrix &matrix,
                                         std::span<const std::size_t> candidates,
                                         double threshold) {
  std::vector<std::size_t> kept;
  for (std::size_t c : candidates) {
    const auto v = column_values(matrix, c);
    if (sample_std(v) > threshold) kept.push_back(c);
  }
  return kept;
}

std::vector<std::size_t> pcc_prune(const FeatureMatrix &matrix,
                                   std::span<const std::size_t> candidates, double threshold) {
  std::vector<std::size_t> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  std::vector<std::vector<double>> cols;
  cols.reserve(k);
  for (std::size_t c : sorted) cols.push_back(column_values(matrix, c));
  UnionFind uf(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double r = 0.0;
      try {
        r = pearson(cols[i], cols[j]);
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kConstantVector) throw;
        continue;
      }
      if (std::abs(r) > threshold) uf.unite(i, j);
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < k; ++i) {
    if (uf.find(i) == i) kept.push_back(sorted[i]);
  }
  return kept;
}

SelectionPipeline SelectionPipeline::fit(const FeatureMatrix &train,
                                         const SelectionThresholds &thresholds,
                                         const std::set<Block> &scope) {
  SelectionPipeline p;
  p.thresholds_ = thresholds;
  p.scope_ = scope;
  for (const auto &c : train.columns) p.fitted_columns_.push_back(c.name);

  NormalizeResult norm = max_normalize(train, scope);
  const FeatureMatrix &m = norm.matrix;
  std::vector<std::size_t> in_scope;
  std::vector<bool> survivor(m.cols(), false);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (scope.count(m.columns[c].block)) {
      in_scope.push_back(c);
    } else {
      survivor[c] = true;
    }
  }
  std::vector<std::size_t> kept = in_scope;
  if (m.rows() >= 2) {
    kept = variance_filter(m, in_scope, thresholds.variance);
    kept = pcc_prune(m, kept, thresholds.pcc);
  }
  for (std::size_t c : kept) survivor[c] = true;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (!survivor[c]) continue;
    const std::string &name = m.columns[c].name;
    p.kept_columns_.push_back(name);
    if (auto it = norm.column_max.find(name); it != norm.column_max.end()) {
      p.column_max_[name] = it->second;
    }
  }
  return p;
}

FeatureMatrix SelectionPipeline::apply(const FeatureMatrix &matrix) const {
  std::vector<std::size_t> source;
  std::vector<double> divisor;
  FeatureMatrix out;
  out.row_ids = matrix.row_ids;
  for (const std::string &name : kept_columns_) {
    auto idx = matrix.column_index(name);
    if (!idx) throw Error(ErrorCode::kUnknownColumn, "column '" + name + "' missing from input");
    source.push_back(*idx);
    auto it = column_max_.find(name);
    divisor.push_back(it == column_max_.end() ? 1.0 : it->second);
    out.columns.push_back(matrix.columns[*idx]);
  }
  out.values.resize(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    auto &row = out.values[r];
    row.reserve(source.size());
    for (std::size_t k = 0; k < source.size(); ++k) row.push_back(matrix.values[r][source[k]] / divisor[k]);
  }
  return out;
}

std::string SelectionPipeline::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["scope"] = blocks_to_string(scope_);
  j["thresholds"] = {{"variance", thresholds_.variance}, {"pcc", thresholds_.pcc}};
  j["fitted_columns"] = fitted_columns_;
  j["kept_columns"] = kept_columns_;
  nlohmann::ordered_json maxima = nlohmann::ordered_json::object();
  for (const auto &name : kept_columns_) {
    if (auto it = column_max_.find(name); it != column_max_.end()) maxima[name] = it->second;
  }
  j["column_max"] = maxima;
  return j.dump(1);
}

SelectionPipeline SelectionPipeline::from_json(const std::string &text) {
  SelectionPipeline p;
  try {
    const auto j = nlohmann::json::parse(text);
    const std::string scope = j.at("scope").get<std::string>();
    if (!scope.empty()) p.scope_ = parse_blocks(scope);
    p.thresholds_.variance = j.at("thresholds").at("variance").get<double>();
    p.thresholds_.pcc = j.at("thresholds").at("pcc").get<double>();
    p.fitted_columns_ = j.at("fitted_columns").get<std::vector<std::string>>();
    p.kept_columns_ = j.at("kept_columns").get<std::vector<std::string>>();
    for (const auto &[name, value] : j.at("column_max").items()) p.column_max_[name] = value.get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormatError, std::string("selection pipeline JSON: ") + e.what());
  }
  return p;
}

} // namespace copas
