#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ssc/metrics.hpp"
#include "ssc/parallel.hpp"
#include "ssc/rng.hpp"
#include "ssc/types.hpp"

namespace ssc {

/// Symmetric affinity W = |C| + |C^T|. Sparsity and the zero diagonal of C
/// are preserved; symmetry is exact because both orientations sum the same
/// two magnitudes.
inline SparseMatrix build_affinity(const SparseMatrix& C) {
  if (C.rows() != C.cols()) throw std::invalid_argument("build_affinity: C must be square");
  SparseMatrix absC = C.cwiseAbs();
  SparseMatrix absCt = SparseMatrix(C.transpose()).cwiseAbs();
  SparseMatrix W = absC + absCt;
  W.makeCompressed();
  return W;
}

struct Embedding {
  Matrix rows;                  ///< n x K, rows normalized to unit length
  std::vector<Index> isolated;  ///< zero-degree vertices pinned to e1
};

namespace detail {

// Subspace iteration with Rayleigh-Ritz on the shifted operator M + I
// (eigenvalues of the normalized affinity lie in [-1, 1], so the shift makes
// the K algebraically largest ones dominant in magnitude).
inline Matrix top_eigenvectors_iterative(const SparseMatrix& W, const Vector& inv_sqrt_degree,
                                         Index K) {
  const Index n = W.rows();
  const Index block = std::min(n, K + 8);
  const auto apply_shifted = [&](const Matrix& Q) -> Matrix {
    const Matrix scaled = inv_sqrt_degree.asDiagonal() * Q;
    return inv_sqrt_degree.asDiagonal() * (W * scaled) + Q;
  };

  Rng rng(0x5e1ec7edu);
  Matrix Q(n, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < n; ++i) Q(i, j) = rng.next_normal();
  Q = Eigen::HouseholderQR<Matrix>(Q).householderQ() * Matrix::Identity(n, block);

  Matrix ritz_vectors;
  for (int iter = 0; iter < 1000; ++iter) {
    const Matrix P = apply_shifted(Q);
    Matrix small = Q.transpose() * P;
    small = 0.5 * (small + small.transpose().eval());
    const Eigen::SelfAdjointEigenSolver<Matrix> ritz(small);
    // Ascending eigenvalues: the top K live in the last K columns.
    const Matrix rotation = ritz.eigenvectors().rightCols(K);
    ritz_vectors = Q * rotation;
    const Vector values = ritz.eigenvalues().tail(K);
    const Matrix residual = apply_shifted(ritz_vectors) - ritz_vectors * values.asDiagonal();
    double worst = 0.0;
    for (Index j = 0; j < K; ++j)
      worst = std::max(worst, residual.col(j).norm() / std::max(1.0, std::abs(values[j])));
    if (worst <= 1e-10) break;
    Q = Eigen::HouseholderQR<Matrix>(P).householderQ() * Matrix::Identity(n, block);
  }
  return ritz_vectors;
}

}  // namespace detail

/// Rows of the K leading eigenvectors of the normalized affinity
/// D^{-1/2} W D^{-1/2}, each normalized to unit Euclidean length. Uses a
/// dense symmetric eigensolver up to dense_cutoff points and shifted subspace
/// iteration beyond. Zero-degree vertices cannot be normalized; they are
/// pinned to e1 and reported in Embedding::isolated.
inline Embedding normalized_embedding(const SparseMatrix& W, Index K,
                                      Index dense_cutoff = 2000) {
  const Index n = W.rows();
  if (W.cols() != n) throw std::invalid_argument("normalized_embedding: W must be square");
  if (K < 1 || K > n) throw std::invalid_argument("normalized_embedding: need 1 <= K <= n");

  const Vector degree = W * Vector::Ones(n);
  Embedding result;
  Vector inv_sqrt_degree(n);
  for (Index i = 0; i < n; ++i) {
    if (degree[i] > 0.0) {
      inv_sqrt_degree[i] = 1.0 / std::sqrt(degree[i]);
    } else {
      inv_sqrt_degree[i] = 0.0;
      result.isolated.push_back(i);
    }
  }
  if (static_cast<Index>(result.isolated.size()) == n)
    throw std::invalid_argument("normalized_embedding: affinity graph has no edges");

  Matrix V;
  if (n <= dense_cutoff) {
    const Matrix normalized =
        inv_sqrt_degree.asDiagonal() * Matrix(W) * inv_sqrt_degree.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(normalized);
    if (eig.info() != Eigen::Success)
      throw NumericalError("normalized_embedding: eigendecomposition failed");
    V = eig.eigenvectors().rightCols(K);
  } else {
    V = detail::top_eigenvectors_iterative(W, inv_sqrt_degree, K);
  }

  result.rows = V;
  for (Index i = 0; i < n; ++i) {
    const double norm = result.rows.row(i).norm();
    if (norm > 0.0 && degree[i] > 0.0) {
      result.rows.row(i) /= norm;
    } else {
      result.rows.row(i).setZero();
      result.rows(i, 0) = 1.0;
    }
  }
  return result;
}

namespace detail {

struct KmeansRun {
  Labels labels;
  double wcss = std::numeric_limits<double>::infinity();
};

inline KmeansRun kmeans_single(const Matrix& V, int K, Rng rng) {
  const Index n = V.rows();

  // Uniform-random choice of K distinct points as initial centroids.
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < K; ++i) {
    const Index pick = i + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick)]);
  }
  Matrix centroids(K, V.cols());
  for (int c = 0; c < K; ++c) centroids.row(c) = V.row(order[static_cast<std::size_t>(c)]);

  Labels labels(static_cast<std::size_t>(n), -1);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = (V.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < K; ++c) {
        const double dist = (V.row(i) - centroids.row(c)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    std::vector<Index> counts(static_cast<std::size_t>(K), 0);
    for (int v : labels) ++counts[static_cast<std::size_t>(v)];
    for (int c = 0; c < K; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Empty cluster: re-seed at the point farthest from its own centroid.
      Index farthest = 0;
      double worst = -1.0;
      for (Index i = 0; i < n; ++i) {
        const int a = labels[static_cast<std::size_t>(i)];
        const double dist = (V.row(i) - centroids.row(a)).squaredNorm();
        if (dist > worst) {
          worst = dist;
          farthest = i;
        }
      }
      labels[static_cast<std::size_t>(farthest)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }

    centroids.setZero();
    std::vector<Index> sizes(static_cast<std::size_t>(K), 0);
    for (Index i = 0; i < n; ++i) {
      centroids.row(labels[static_cast<std::size_t>(i)]) += V.row(i);
      ++sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < K; ++c)
      if (sizes[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    if (!changed) break;
  }

  double wcss = 0.0;
  for (Index i = 0; i < n; ++i)
    wcss += (V.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return KmeansRun{std::move(labels), wcss};
}

}  // namespace detail

/// Lloyd's algorithm with uniform-random point initialization, several
/// restarts, and the lowest within-cluster sum of squares winning (lowest
/// restart index on ties). Deterministic in rng_seed; restarts use
/// independent derived streams and may run in parallel.
inline Labels kmeans(const Matrix& V, int K, int restarts, std::uint64_t rng_seed,
                     int threads = 1) {
  if (K < 1 || static_cast<Index>(K) > V.rows())
    throw std::invalid_argument("kmeans: need 1 <= K <= n");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");

  std::vector<detail::KmeansRun> runs(static_cast<std::size_t>(restarts));
  parallel_for(0, restarts, threads, [&](std::int64_t r) {
    runs[static_cast<std::size_t>(r)] =
        detail::kmeans_single(V, K, Rng(rng_seed, static_cast<std::uint64_t>(r)));
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].wcss < runs[best].wcss) best = r;
  return std::move(runs[best].labels);
}

/// End-to-end spectral clustering of a coefficient matrix:
/// affinity -> normalized embedding -> k-means (best of 20 restarts).
inline Labels cluster(const SparseMatrix& C, int K, std::uint64_t rng_seed,
                      int threads = 1) {
  const SparseMatrix W = build_affinity(C);
  const Embedding embedding = normalized_embedding(W, K);
  return kmeans(embedding.rows, K, 20, rng_seed, threads);
}

}  // namespace ssc
