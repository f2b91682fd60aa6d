// Independent reference implementations used only by the test suites. These
// deliberately avoid the library's algorithms: grids, exhaustive scans,
// brute-force enumeration, finite differences, and dense factorizations.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "ssc/types.hpp"

namespace oracle {

using ssc::Index;
using ssc::Labels;
using ssc::Matrix;
using ssc::Vector;

// 1D prox of gamma|c| at d: coarse grid to bracket the minimizer of the
// convex objective 0.5 (c-d)^2 + gamma |c|, then bisection on the sign of
// the (monotone) subgradient c - d + gamma sign(c). Value-based refinement
// stalls at sqrt(eps); the derivative route reaches machine precision.
inline double prox_abs_1d(double d, double gamma, int grid = 2001) {
  const double lo = std::min(0.0, d) - 1.0;
  const double hi = std::max(0.0, d) + 1.0;
  const auto objective = [&](double c) { return 0.5 * (c - d) * (c - d) + gamma * std::abs(c); };
  double best = lo;
  double best_val = objective(lo);
  for (int i = 1; i < grid; ++i) {
    const double c = lo + (hi - lo) * i / (grid - 1);
    const double v = objective(c);
    if (v < best_val) {
      best_val = v;
      best = c;
    }
  }
  const double step = (hi - lo) / (grid - 1);
  double a = best - step;
  double b = best + step;
  for (int it = 0; it < 200 && b - a > 0.0; ++it) {
    const double mid = 0.5 * (a + b);
    double slope;
    if (mid > 0.0) {
      slope = mid - d + gamma;
    } else if (mid < 0.0) {
      slope = mid - d - gamma;
    } else {
      // Subdifferential at zero is [-gamma, gamma] shifted by -d.
      if (std::abs(d) <= gamma) return 0.0;
      slope = d > 0 ? -1.0 : 1.0;
    }
    if (slope > 0.0) {
      b = mid;
    } else if (slope < 0.0) {
      a = mid;
    } else {
      return mid;
    }
  }
  return 0.5 * (a + b);
}

// Exhaustive-scan solver for the affine l1 prox: solve the 1D linear
// equation sum_i shrink(d_i - beta) = 1 on every breakpoint interval and
// keep the feasible root.
inline Vector prox_l1_affine_scan(const Vector& d, double gamma) {
  const Index m = d.size();
  std::vector<double> pts;
  pts.reserve(2 * m + 2);
  for (Index i = 0; i < m; ++i) {
    pts.push_back(d[i] - gamma);
    pts.push_back(d[i] + gamma);
  }
  std::sort(pts.begin(), pts.end());
  const double margin = 1.0 + std::abs(pts.front()) + std::abs(pts.back());
  pts.insert(pts.begin(), pts.front() - margin);
  pts.push_back(pts.back() + margin);

  const auto shrink_sum = [&](double beta) {
    double s = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double v = d[i] - beta;
      const double a = std::abs(v) - gamma;
      if (a > 0.0) s += v < 0 ? -a : a;
    }
    return s;
  };

  double best_beta = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < pts.size(); ++t) {
    const double lo = pts[t];
    const double hi = pts[t + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    // On this interval each term is linear: slope -1 where active, 0 where
    // shrunk to zero.
    double sum_const = 0.0;
    int active = 0;
    for (Index i = 0; i < m; ++i) {
      if (d[i] - gamma > mid) {
        sum_const += d[i] - gamma;
        ++active;
      } else if (d[i] + gamma < mid) {
        sum_const += d[i] + gamma;
        ++active;
      }
    }
    if (active == 0) continue;
    const double root = (sum_const - 1.0) / active;
    const double slack = 1e-9 * (1.0 + std::abs(root));
    if (root >= lo - slack && root <= hi + slack) {
      const double gap = std::abs(shrink_sum(root) - 1.0);
      if (gap < best_gap) {
        best_gap = gap;
        best_beta = root;
      }
    }
  }

  Vector c(m);
  for (Index i = 0; i < m; ++i) {
    const double v = d[i] - best_beta;
    const double a = std::abs(v) - gamma;
    c[i] = a > 0.0 ? (v < 0 ? -a : a) : 0.0;
  }
  return c;
}

// Hyperplane projection restricted to a support; entries off the support are
// zero.
inline Vector project_support(const Vector& d, const std::vector<Index>& support) {
  double sum = 0.0;
  for (Index i : support) sum += d[i];
  const double shift = (sum - 1.0) / static_cast<double>(support.size());
  Vector c = Vector::Zero(d.size());
  for (Index i : support) c[i] = d[i] - shift;
  return c;
}

inline void for_each_subset(Index m, Index k, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> pick(static_cast<std::size_t>(k));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == k) {
      fn(pick);
      return;
    }
    for (Index i = start; i <= m - (k - depth); ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

// Brute-force optimum of 0.5||c-d||^2 s.t. ||c||_0 <= k, c^T 1 = 1 by
// enumerating all size-k supports.
inline double gshp_best_objective(const Vector& d, Index k) {
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(d.size(), k, [&](const std::vector<Index>& support) {
    const Vector c = project_support(d, support);
    best = std::min(best, 0.5 * (c - d).squaredNorm());
  });
  return best;
}

// Brute-force optimum of 0.5||c-d||^2 s.t. ||c||_0 <= k.
inline double top_k_best_objective(const Vector& d, Index k) {
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(d.size(), k, [&](const std::vector<Index>& support) {
    Vector c = Vector::Zero(d.size());
    for (Index i : support) c[i] = d[i];
    best = std::min(best, 0.5 * (c - d).squaredNorm());
  });
  return best;
}

inline double spectral_norm_svd(const Matrix& X) {
  return Eigen::JacobiSVD<Matrix>(X).singularValues()(0);
}

// Central finite differences of f(C) = 0.5 * lambda_e ||X - XC||_F^2.
inline Matrix finite_difference_gradient(const Matrix& C, const Matrix& X, double lambda_e,
                                         double h = 1e-6) {
  const auto f = [&](const Matrix& B) { return 0.5 * lambda_e * (X - X * B).squaredNorm(); };
  Matrix grad(C.rows(), C.cols());
  for (Index j = 0; j < C.cols(); ++j) {
    for (Index i = 0; i < C.rows(); ++i) {
      Matrix up = C, down = C;
      up(i, j) += h;
      down(i, j) -= h;
      grad(i, j) = (f(up) - f(down)) / (2.0 * h);
    }
  }
  return grad;
}

// Misclustering fraction minimized over all label permutations (K <= ~8).
inline double clustering_error_bruteforce(const Labels& pred, const Labels& truth) {
  int k = 0;
  for (int v : pred) k = std::max(k, v + 1);
  for (int v : truth) k = std::max(k, v + 1);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best_matched = 0;
  do {
    std::size_t matched = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (perm[static_cast<std::size_t>(pred[i])] == truth[i]) ++matched;
    best_matched = std::max(best_matched, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 1.0 - static_cast<double>(best_matched) / static_cast<double>(pred.size());
}

// Direct-summation subspace-preserving error on a dense matrix, iterating
// rows in ascending order per column exactly like the definition reads.
inline double subspace_preserving_error_direct(const Matrix& C, const Labels& truth) {
  const Index n = C.cols();
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    double l1 = 0.0, wrong = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double v = C(i, j);
      if (v == 0.0) continue;
      l1 += std::abs(v);
      if (truth[static_cast<std::size_t>(i)] != truth[static_cast<std::size_t>(j)])
        wrong += std::abs(v);
    }
    if (l1 != 0.0) total += wrong / l1;
  }
  return total / static_cast<double>(n);
}

// Straightforward re-implementation of the model objectives.
inline double objective_direct(const Matrix& C, const Matrix& X, double lambda_e, bool l1) {
  double fit = 0.0;
  const Matrix R = X - X * C;
  for (Index j = 0; j < R.cols(); ++j)
    for (Index i = 0; i < R.rows(); ++i) fit += R(i, j) * R(i, j);
  if (!l1) return 0.5 * fit;
  double mass = 0.0;
  for (Index j = 0; j < C.cols(); ++j)
    for (Index i = 0; i < C.rows(); ++i) mass += std::abs(C(i, j));
  return mass + 0.5 * lambda_e * fit;
}

inline Vector random_vector(std::mt19937_64& gen, Index m, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(m);
  for (Index i = 0; i < m; ++i) v[i] = normal(gen);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& gen, Index rows, Index cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(gen);
  return m;
}

}  // namespace oracle
