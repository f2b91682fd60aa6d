#include "ssc/spectral.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <random>

#include "oracles.hpp"
#include "ssc/metrics.hpp"

using ssc::Index;
using ssc::Labels;
using ssc::Matrix;
using ssc::SparseMatrix;
using ssc::Vector;

namespace {

SparseMatrix sparse_from(const Matrix& dense) { return dense.sparseView(); }

TEST(BuildAffinity, ZeroInZeroOut) {
  const SparseMatrix W = ssc::build_affinity(SparseMatrix(5, 5));
  EXPECT_EQ(W.nonZeros(), 0);
}

TEST(BuildAffinity, AbsoluteValueAndSymmetrization) {
  Matrix C = Matrix::Zero(3, 3);
  C(0, 1) = -2.0;
  const SparseMatrix W = ssc::build_affinity(sparse_from(C));
  EXPECT_DOUBLE_EQ(W.coeff(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(W.coeff(1, 0), 2.0);
}

TEST(BuildAffinity, SparsityBoundAndExactSymmetry) {
  std::mt19937_64 gen(111);
  Matrix C = Matrix::Zero(20, 20);
  for (int t = 0; t < 50; ++t) {
    const Index i = static_cast<Index>(gen() % 20);
    const Index j = static_cast<Index>(gen() % 20);
    if (i != j) C(i, j) = oracle::random_vector(gen, 1)[0];
  }
  const SparseMatrix S = sparse_from(C);
  const SparseMatrix W = ssc::build_affinity(S);
  EXPECT_LE(W.nonZeros(), 2 * S.nonZeros());
  const Matrix dense(W);
  for (Index j = 0; j < 20; ++j)
    for (Index i = 0; i < 20; ++i) ASSERT_EQ(dense(i, j), dense(j, i));
}

TEST(BuildAffinity, RejectsNonSquare) {
  EXPECT_THROW(ssc::build_affinity(SparseMatrix(3, 4)), std::invalid_argument);
}

Matrix two_complete_blocks(Index block) {
  const Index n = 2 * block;
  Matrix W = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if ((i < block) == (j < block)) W(i, j) = 1.0;
    }
  }
  return W;
}

TEST(NormalizedEmbedding, IdealBlockStructureSeparates) {
  const SparseMatrix W = sparse_from(two_complete_blocks(4));
  const auto embedding = ssc::normalized_embedding(W, 2);
  ASSERT_EQ(embedding.rows.rows(), 8);
  for (Index i = 1; i < 4; ++i) {
    const double aligned = std::abs(embedding.rows.row(i).dot(embedding.rows.row(0)));
    EXPECT_NEAR(aligned, 1.0, 1e-10);  // same block: identical up to sign
  }
  const double across = std::abs(embedding.rows.row(0).dot(embedding.rows.row(5)));
  EXPECT_LT(across, 0.5);  // blocks are orthogonal in the ideal case
}

TEST(NormalizedEmbedding, CompleteGraphPerronRow) {
  Matrix W = Matrix::Ones(6, 6);
  W.diagonal().setZero();
  const auto embedding = ssc::normalized_embedding(sparse_from(W), 1);
  for (Index i = 0; i < 6; ++i) EXPECT_NEAR(std::abs(embedding.rows(i, 0)), 1.0, 1e-12);
  for (Index i = 1; i < 6; ++i)
    EXPECT_NEAR(embedding.rows(i, 0), embedding.rows(0, 0), 1e-12);
}

TEST(NormalizedEmbedding, RowsHaveUnitNorm) {
  std::mt19937_64 gen(112);
  Matrix W = oracle::random_matrix(gen, 15, 15).cwiseAbs();
  W = ((W + W.transpose()) / 2).eval();
  W.diagonal().setZero();
  const auto embedding = ssc::normalized_embedding(sparse_from(W), 4);
  for (Index i = 0; i < 15; ++i)
    EXPECT_NEAR(embedding.rows.row(i).norm(), 1.0, 1e-12);
}

TEST(NormalizedEmbedding, DenseAndIterativePathsSpanSameSubspace) {
  std::mt19937_64 gen(113);
  Matrix W = oracle::random_matrix(gen, 40, 40).cwiseAbs();
  W = ((W + W.transpose()) / 2).eval();
  W.diagonal().setZero();
  const SparseMatrix S = sparse_from(W);
  const Index K = 3;
  const Matrix dense_path = ssc::normalized_embedding(S, K).rows;
  const Matrix iterative_path = ssc::normalized_embedding(S, K, /*dense_cutoff=*/0).rows;

  // Principal angles between the two row spaces, computed from orthonormal
  // bases of each span.
  const auto orthonormalize = [](const Matrix& M) {
    return Matrix(Eigen::HouseholderQR<Matrix>(M).householderQ() *
                  Matrix::Identity(M.rows(), M.cols()));
  };
  const Matrix Qa = orthonormalize(dense_path);
  const Matrix Qb = orthonormalize(iterative_path);
  const Eigen::JacobiSVD<Matrix> svd(Qa.transpose() * Qb);
  for (Index s = 0; s < K; ++s) {
    const double cosine = std::min(1.0, svd.singularValues()(s));
    EXPECT_LE(std::acos(cosine), 1e-6);
  }
}

TEST(NormalizedEmbedding, IsolatedVertexPinnedToE1) {
  Matrix W = two_complete_blocks(3);
  W.row(5).setZero();
  W.col(5).setZero();  // vertex 5 has no edges
  const auto embedding = ssc::normalized_embedding(sparse_from(W), 2);
  ASSERT_EQ(embedding.isolated, std::vector<Index>{5});
  EXPECT_DOUBLE_EQ(embedding.rows(5, 0), 1.0);
  EXPECT_DOUBLE_EQ(embedding.rows(5, 1), 0.0);
}

TEST(NormalizedEmbedding, RejectsBadArguments) {
  const SparseMatrix W = sparse_from(two_complete_blocks(2));
  EXPECT_THROW(ssc::normalized_embedding(W, 5), std::invalid_argument);
  EXPECT_THROW(ssc::normalized_embedding(SparseMatrix(4, 4), 2), std::invalid_argument);
}

Matrix separated_clouds(std::mt19937_64& gen, Index per_cloud, double separation) {
  Matrix V(2 * per_cloud, 2);
  for (Index i = 0; i < per_cloud; ++i) {
    V.row(i) = oracle::random_vector(gen, 2, 0.05).transpose();
    V.row(per_cloud + i) =
        oracle::random_vector(gen, 2, 0.05).transpose() + Eigen::RowVector2d(separation, 0.0);
  }
  return V;
}

TEST(Kmeans, RecoversSeparatedClouds) {
  std::mt19937_64 gen(114);
  const Matrix V = separated_clouds(gen, 20, 10.0);
  const Labels labels = ssc::kmeans(V, 2, 20, 7);
  Labels truth(40, 0);
  for (int i = 20; i < 40; ++i) truth[static_cast<std::size_t>(i)] = 1;
  EXPECT_DOUBLE_EQ(ssc::clustering_error(labels, truth), 0.0);
}

TEST(Kmeans, EveryPointItsOwnCluster) {
  std::mt19937_64 gen(115);
  const Matrix V = oracle::random_matrix(gen, 6, 3);
  const Labels labels = ssc::kmeans(V, 6, 5, 1);
  std::vector<bool> seen(6, false);
  for (int v : labels) {
    EXPECT_FALSE(seen[static_cast<std::size_t>(v)]);
    seen[static_cast<std::size_t>(v)] = true;
  }
}

TEST(Kmeans, PartitionSurvivesDuplication) {
  std::mt19937_64 gen(116);
  const Matrix V = separated_clouds(gen, 15, 8.0);
  Matrix doubled(V.rows() * 2, V.cols());
  doubled.topRows(V.rows()) = V;
  doubled.bottomRows(V.rows()) = V;
  const Labels base = ssc::kmeans(V, 2, 10, 21);
  const Labels dup = ssc::kmeans(doubled, 2, 10, 21);
  Labels dup_front(dup.begin(), dup.begin() + V.rows());
  Labels dup_back(dup.begin() + V.rows(), dup.end());
  EXPECT_DOUBLE_EQ(ssc::clustering_error(dup_front, base), 0.0);
  EXPECT_DOUBLE_EQ(ssc::clustering_error(dup_back, base), 0.0);
}

TEST(Kmeans, DeterministicAndThreadInvariant) {
  std::mt19937_64 gen(117);
  const Matrix V = oracle::random_matrix(gen, 30, 4);
  const Labels a = ssc::kmeans(V, 3, 20, 5, /*threads=*/1);
  const Labels b = ssc::kmeans(V, 3, 20, 5, /*threads=*/4);
  EXPECT_EQ(a, b);
}

Matrix block_diagonal_coefficients(Index block) {
  const Index n = 2 * block;
  Matrix C = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      if ((i < block) == (j < block)) C(i, j) = 1.0 / static_cast<double>(block - 1);
    }
  }
  return C;
}

TEST(Cluster, BlockDiagonalCoefficientsClusterPerfectly) {
  const SparseMatrix C = sparse_from(block_diagonal_coefficients(6));
  Labels truth(12, 0);
  for (int i = 6; i < 12; ++i) truth[static_cast<std::size_t>(i)] = 1;
  for (const std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const Labels labels = ssc::cluster(C, 2, seed);
    EXPECT_DOUBLE_EQ(ssc::clustering_error(labels, truth), 0.0) << "seed " << seed;
  }
}

TEST(Cluster, ZeroCoefficientsSignalError) {
  EXPECT_THROW(ssc::cluster(SparseMatrix(8, 8), 2, 0), std::invalid_argument);
}

TEST(Cluster, SeedStabilityOnWellSeparatedData) {
  const SparseMatrix C = sparse_from(block_diagonal_coefficients(5));
  const Labels a = ssc::cluster(C, 2, 101);
  const Labels b = ssc::cluster(C, 2, 202);
  EXPECT_DOUBLE_EQ(ssc::clustering_error(a, b), 0.0);
}

}  // namespace
