// SPDX-License-Identifier: Apache-2.0
//
// Epsilon-SVR dual solved by SMO with second-order working-set selection.
// The 2n dual variables are (alpha, alpha*) with labels (+1, -1); the
// quadratic term is Q[i][j] = s_i s_j K(x_i mod n, x_j mod n).

#include <algorithm>
#include <cmath>

#include "copas/error.h"
#include "copas/models.h"
#include "models/common.h"

namespace copas {
namespace {

constexpr double kTau = 1e-12;

double default_gamma(const Rows &x) {
  const std::size_t n = x.size();
  const std::size_t p = x[0].size();
  if (p == 0) return 1.0;
  double total = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    double mean = 0.0;
    for (const auto &row : x) mean += row[c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto &row : x) var += (row[c] - mean) * (row[c] - mean);
    total += var / static_cast<double>(n);
  }
  const double mean_var = total / static_cast<double>(p);
  return mean_var > 0.0 ? 1.0 / (static_cast<double>(p) * mean_var) : 1.0;
}

class SmoSolver {
public:
  SmoSolver(const SVRModel &model, const Rows &x, std::span<const double> y)
      : n_(x.size()), c_(model.c), kernel_(n_ * n_), alpha_(2 * n_, 0.0), grad_(2 * n_),
        sign_(2 * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = model.kernel_value(x[i], x[j]);
        kernel_[i * n_ + j] = k;
        kernel_[j * n_ + i] = k;
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      sign_[i] = 1;
      sign_[i + n_] = -1;
      grad_[i] = model.epsilon - y[i];
      grad_[i + n_] = model.epsilon + y[i];
    }
  }

  // Returns the number of pair updates performed.
  long solve(double tolerance, long max_iterations, bool *converged, double *violation) {
    long iter = 0;
    while (true) {
      std::size_t i = 0, j = 0;
      const double gap = select(&i, &j);
      *violation = gap;
      if (gap < tolerance) {
        *converged = true;
        return iter;
      }
      if (iter >= max_iterations) {
        *converged = false;
        return iter;
      }
      update(i, j);
      ++iter;
    }
  }

  double bias() const {
    double ub = INFINITY, lb = -INFINITY, sum_free = 0.0;
    int free = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double yg = sign_[t] * grad_[t];
      if (at_upper(t)) {
        if (sign_[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (sign_[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++free;
        sum_free += yg;
      }
    }
    const double rho = free > 0 ? sum_free / free : (ub + lb) / 2.0;
    return -rho;
  }

  double coef(std::size_t i) const { return alpha_[i] - alpha_[i + n_]; }

private:
  double q(std::size_t a, std::size_t b) const {
    return sign_[a] * sign_[b] * kernel_[(a % n_) * n_ + (b % n_)];
  }
  double qd(std::size_t a) const { return kernel_[(a % n_) * n_ + (a % n_)]; }
  bool at_upper(std::size_t t) const { return alpha_[t] >= c_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  // Maximal-violating first index, then the partner with the largest
  // second-order objective decrease. Returns the KKT gap.
  double select(std::size_t *out_i, std::size_t *out_j) const {
    double gmax = -INFINITY;
    std::size_t i = SIZE_MAX;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      if (sign_[t] == 1) {
        if (!at_upper(t) && -grad_[t] >= gmax) { gmax = -grad_[t]; i = t; }
      } else {
        if (!at_lower(t) && grad_[t] >= gmax) { gmax = grad_[t]; i = t; }
      }
    }
    double gmax2 = -INFINITY;
    double best = INFINITY;
    std::size_t j = SIZE_MAX;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      double grad_diff = 0.0;
      if (sign_[t] == 1) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, grad_[t]);
        grad_diff = gmax + grad_[t];
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -grad_[t]);
        grad_diff = gmax - grad_[t];
      }
      if (i == SIZE_MAX || grad_diff <= 0.0) continue;
      double quad = qd(i) + qd(t) - 2.0 * sign_[i] * sign_[t] * q(i, t);
      if (quad <= 0.0) quad = kTau;
      const double obj = -(grad_diff * grad_diff) / quad;
      if (obj <= best) { best = obj; j = t; }
    }
    *out_i = i;
    *out_j = j;
    if (i == SIZE_MAX || j == SIZE_MAX) return 0.0;
    return gmax + gmax2;
  }

  void update(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double &ai = alpha_[i];
    double &aj = alpha_[j];
    if (sign_[i] != sign_[j]) {
      double quad = qd(i) + qd(j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c_) { ai = c_; aj = c_ - diff; }
      } else {
        if (aj > c_) { aj = c_; ai = c_ + diff; }
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) { ai = c_; aj = sum - c_; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c_) {
        if (aj > c_) { aj = c_; ai = sum - c_; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (std::size_t t = 0; t < 2 * n_; ++t) grad_[t] += q(i, t) * di + q(j, t) * dj;
  }

  std::size_t n_;
  double c_;
  std::vector<double> kernel_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<int> sign_;
};

} // namespace

double SVRModel::kernel_value(std::span<const double> a, std::span<const double> b) const {
  if (kernel == KernelKind::kLinear) {
    double dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    return dot;
  }
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return std::exp(-gamma * d2);
}

SVRModel fit_svr(const Rows &x, std::span<const double> y, const TrainConfig &config) {
  internal::check_training_set(x, y);
  if (!(config.c > 0.0) || !(config.epsilon >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "SVR needs C > 0 and epsilon >= 0");
  }
  SVRModel m;
  m.width = x[0].size();
  m.kernel = config.kernel;
  m.gamma = config.gamma.value_or(default_gamma(x));
  m.c = config.c;
  m.epsilon = config.epsilon;

  SmoSolver solver(m, x, y);
  m.iterations = solver.solve(config.tolerance, config.max_iterations, &m.converged,
                              &m.max_violation);
  m.bias = solver.bias();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = solver.coef(i);
    if (a != 0.0) {
      m.support_vectors.push_back(x[i]);
      m.dual_coef.push_back(a);
    }
  }
  return m;
}

} // namespace copas
