// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations shared by the unit tests and the
// acceptance checks. They follow the formulas directly and trade speed for
// obviousness.

#ifndef COPAS_TESTS_SUPPORT_ORACLES_H_
#define COPAS_TESTS_SUPPORT_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "copas/features.h"
#include "copas/models.h"

namespace copas::testing {

inline FeatureMatrix matrix_of(const std::vector<std::vector<double>> &columns, Block block = Block::kDescriptors) {
  FeatureMatrix m;
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (std::size_t c = 0; c < columns.size(); ++c) m.columns.push_back({"c" + std::to_string(c), block});
  m.values.assign(rows, std::vector<double>(columns.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    m.row_ids.push_back("r" + std::to_string(r));
    for (std::size_t c = 0; c < columns.size(); ++c) m.values[r][c] = columns[c][r];
  }
  return m;
}

inline std::vector<double> column(const FeatureMatrix &m, std::size_t c) {
  std::vector<double> v;
  for (const auto &row : m.values) v.push_back(row[c]);
  return v;
}

// Independent reimplementation of the cascade straight from the formulas:
// X' = X / max|X|, s = sqrt(sum (x - mean)^2 / (n - 1)), r = cov / (sx sy),
// and connected components found by depth-first search.
struct OracleResult {
  std::vector<std::string> kept;
  std::vector<std::vector<std::string>> components;
};

inline OracleResult oracle_cascade(const FeatureMatrix &m, double var_threshold, double pcc_threshold) {
  const std::size_t n = m.rows();
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::vector<double> v = column(m, c);
    double mx = 0;
    for (double x : v) mx = std::max(mx, std::fabs(x));
    if (mx == 0) continue;
    for (double &x : v) x /= mx;
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    if (std::sqrt(ss / static_cast<double>(n - 1)) <= var_threshold) continue;
    cols.push_back(v);
    names.push_back(m.columns[c].name);
  }
  auto corr = [&](const std::vector<double> &x, const std::vector<double> &y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
  };
  const std::size_t k = cols.size();
  std::vector<int> label(k, -1);
  OracleResult out;
  for (std::size_t s = 0; s < k; ++s) {
    if (label[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    label[s] = static_cast<int>(out.components.size());
    std::vector<std::string> members;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      members.push_back(names[u]);
      for (std::size_t v = 0; v < k; ++v) {
        if (label[v] < 0 && std::fabs(corr(cols[u], cols[v])) > pcc_threshold) {
          label[v] = label[s];
          stack.push_back(v);
        }
      }
    }
    out.kept.push_back(names[s]);  // s is the smallest index of its component
    out.components.push_back(members);
  }
  return out;
}

struct Stump {
  int feature = -1;
  double threshold = 0.0;
  double left = 0.0;
  double right = 0.0;
};

// Exhaustive depth-1 search: every feature, every midpoint between distinct
// sorted values, scored by the summed squared error of both sides.
inline Stump brute_force_stump(const Rows &x, const std::vector<double> &y) {
  const std::size_t n = y.size();
  auto sse = [](const std::vector<double> &v) {
    if (v.empty()) return 0.0L;
    long double mean = 0;
    for (double t : v) mean += t;
    mean /= static_cast<long double>(v.size());
    long double s = 0;
    for (double t : v) s += (t - mean) * (t - mean);
    return s;
  };
  auto mean = [](const std::vector<double> &v) {
    long double m = 0;
    for (double t : v) m += t;
    return static_cast<double>(m / static_cast<long double>(v.size()));
  };
  Stump best;
  best.left = best.right = mean(y);
  if (sse(y) == 0) return best;
  long double best_sse = std::numeric_limits<long double>::infinity();
  for (std::size_t f = 0; f < x[0].size(); ++f) {
    std::set<double> values;
    for (const auto &row : x) values.insert(row[f]);
    std::vector<double> sorted(values.begin(), values.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      const double t = (sorted[k] + sorted[k + 1]) / 2;
      std::vector<double> l, r;
      for (std::size_t i = 0; i < n; ++i) (x[i][f] <= t ? l : r).push_back(y[i]);
      const long double s = sse(l) + sse(r);
      if (best.feature < 0 || s < best_sse - 1e-9L * std::max(1.0L, std::fabs(best_sse))) {
        best_sse = s;
        best = {static_cast<int>(f), t, mean(l), mean(r)};
      }
    }
  }
  return best;
}

} // namespace copas::testing

#endif // COPAS_TESTS_SUPPORT_ORACLES_H_
