#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ssc/types.hpp"

namespace ssc {

namespace detail {

/// Hungarian algorithm (Jonker-style with potentials) for a square cost
/// matrix; returns the column assigned to each row of a minimum-cost perfect
/// matching. O(dim^3).
inline std::vector<int> hungarian_assignment(const std::vector<std::vector<double>>& cost) {
  const int dim = static_cast<int>(cost.size());
  const double kInf = std::numeric_limits<double>::infinity();
  // 1-based with a dummy row/column 0.
  std::vector<double> u(dim + 1, 0.0), v(dim + 1, 0.0);
  std::vector<int> match(dim + 1, 0), way(dim + 1, 0);
  for (int i = 1; i <= dim; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(dim + 1, kInf);
    std::vector<char> used(dim + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= dim; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= dim; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(dim, -1);
  for (int j = 1; j <= dim; ++j) {
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

inline int label_count(const Labels& labels) {
  int k = 0;
  for (int v : labels) {
    if (v < 0) throw std::invalid_argument("labels must be non-negative");
    k = std::max(k, v + 1);
  }
  return k;
}

}  // namespace detail

/// Fraction of misclustered points under the best matching of predicted to
/// ground-truth labels (Hungarian assignment on the confusion matrix).
inline double clustering_error(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("clustering_error: length mismatch");
  if (pred.empty()) return 0.0;
  const int k = std::max(detail::label_count(pred), detail::label_count(truth));
  std::vector<std::vector<double>> confusion(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < pred.size(); ++i) confusion[pred[i]][truth[i]] += 1.0;
  // Maximize matched points = minimize negated counts.
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) cost[a][b] = -confusion[a][b];
  const std::vector<int> assign = detail::hungarian_assignment(cost);
  double matched = 0.0;
  for (int a = 0; a < k; ++a) matched += confusion[a][assign[a]];
  return 1.0 - matched / static_cast<double>(pred.size());
}

/// Average fraction of each column's l1 mass placed on points of a different
/// cluster. All-zero columns contribute 0; their count is reported through
/// zero_columns when non-null.
inline double subspace_preserving_error(const SparseMatrix& C, const Labels& truth,
                                        Index* zero_columns = nullptr) {
  const Index n = C.cols();
  if (C.rows() != n) throw std::invalid_argument("subspace_preserving_error: C must be square");
  if (static_cast<Index>(truth.size()) != n)
    throw std::invalid_argument("subspace_preserving_error: truth length mismatch");
  Index zeros = 0;
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    double l1 = 0.0;
    double wrong = 0.0;
    for (SparseMatrix::InnerIterator it(C, j); it; ++it) {
      const double a = std::abs(it.value());
      l1 += a;
      if (truth[it.row()] != truth[j]) wrong += a;
    }
    if (l1 == 0.0) {
      ++zeros;
    } else {
      total += wrong / l1;
    }
  }
  if (zero_columns) *zero_columns = zeros;
  return total / static_cast<double>(n);
}

inline double subspace_preserving_error(const Matrix& C, const Labels& truth,
                                        Index* zero_columns = nullptr) {
  return subspace_preserving_error(SparseMatrix(C.sparseView()), truth, zero_columns);
}

namespace detail {
inline double objective_from_residual(double l1_norm, double residual_sq,
                                      double lambda_e, ModelKind kind) {
  if (is_l1(kind)) return l1_norm + 0.5 * lambda_e * residual_sq;
  return 0.5 * residual_sq;
}
}  // namespace detail

/// Model objective at C: ||C||_1 + (lambda_e/2) ||X - XC||_F^2 for l1 modes,
/// 0.5 ||X - XC||_F^2 for l0 modes. Feasibility of C is not checked here.
inline double objective_value(const Matrix& C, const Matrix& X, double lambda_e,
                              ModelKind kind) {
  if (C.rows() != X.cols() || C.cols() != X.cols())
    throw std::invalid_argument("objective_value: dimension mismatch");
  const double residual_sq = (X - X * C).squaredNorm();
  const double l1_norm = is_l1(kind) ? C.cwiseAbs().sum() : 0.0;
  return detail::objective_from_residual(l1_norm, residual_sq, lambda_e, kind);
}

inline double objective_value(const SparseMatrix& C, const Matrix& X, double lambda_e,
                              ModelKind kind) {
  if (C.rows() != X.cols() || C.cols() != X.cols())
    throw std::invalid_argument("objective_value: dimension mismatch");
  const double residual_sq = (X - X * C).squaredNorm();
  double l1_norm = 0.0;
  if (is_l1(kind)) {
    for (Index j = 0; j < C.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(C, j); it; ++it) l1_norm += std::abs(it.value());
  }
  return detail::objective_from_residual(l1_norm, residual_sq, lambda_e, kind);
}

}  // namespace ssc
