#pragma once

#include <cmath>
#include <vector>

#include "ssc/parallel.hpp"
#include "ssc/types.hpp"

namespace ssc {

/// Orthogonal matching pursuit for one self-representation column: greedily
/// selects up to k atoms from X with column j excluded, refitting least
/// squares on the selected set each round. Atoms are used as-is (no
/// renormalization). Stops early once the residual norm drops to 1e-12.
/// Rank-deficient refits fall back to the minimum-norm solution.
inline Eigen::SparseVector<double> omp_column(const Matrix& X, Index j, Index k) {
  const Index n = X.cols();
  if (j < 0 || j >= n) throw std::invalid_argument("omp_column: index out of range");
  if (k < 1 || k > n - 1) throw std::invalid_argument("omp_column: need 1 <= k <= n-1");

  const Vector target = X.col(j);
  Vector residual = target;
  std::vector<Index> selected;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  used[j] = 1;
  Vector coefficients;

  for (Index round = 0; round < k; ++round) {
    if (residual.norm() <= 1e-12) break;  // exact representation found

    const Vector correlation = X.transpose() * residual;
    Index best = -1;
    double best_abs = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double a = std::abs(correlation[i]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0 || best_abs == 0.0) break;  // nothing left to explain the residual

    used[best] = 1;
    selected.push_back(best);

    Matrix atoms(X.rows(), static_cast<Index>(selected.size()));
    for (std::size_t s = 0; s < selected.size(); ++s) atoms.col(s) = X.col(selected[s]);
    coefficients = atoms.completeOrthogonalDecomposition().solve(target);
    residual = target - atoms * coefficients;
  }

  Eigen::SparseVector<double> c(n);
  c.reserve(static_cast<Index>(selected.size()));
  for (std::size_t s = 0; s < selected.size(); ++s)
    c.insert(selected[s]) = coefficients[static_cast<Index>(s)];
  return c;
}

/// OMP applied to every column; columns are independent and run in parallel.
inline SparseMatrix omp_solve(const Matrix& X, Index k, int threads = 1) {
  const Index n = X.cols();
  if (n < 2) throw std::invalid_argument("omp_solve: need at least 2 points");
  std::vector<Eigen::SparseVector<double>> columns(static_cast<std::size_t>(n));
  parallel_for(0, n, threads, [&](std::int64_t j) {
    columns[static_cast<std::size_t>(j)] = omp_column(X, static_cast<Index>(j), k);
  });

  std::vector<Eigen::Triplet<double>> triplets;
  for (Index j = 0; j < n; ++j) {
    for (Eigen::SparseVector<double>::InnerIterator it(columns[static_cast<std::size_t>(j)]);
         it; ++it)
      triplets.emplace_back(it.index(), j, it.value());
  }
  SparseMatrix C(n, n);
  C.setFromTriplets(triplets.begin(), triplets.end());
  return C;
}

}  // namespace ssc
