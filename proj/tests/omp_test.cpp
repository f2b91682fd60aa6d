#include "ssc/omp_solver.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ssc/data_io.hpp"
#include "ssc/metrics.hpp"

using ssc::Index;
using ssc::Matrix;
using ssc::SparseMatrix;
using ssc::Vector;

namespace {

TEST(OmpColumn, ExactOneSparseMatch) {
  std::mt19937_64 gen(101);
  Matrix X = oracle::random_matrix(gen, 5, 6);
  X.col(3) = X.col(0);  // duplicate atom
  const auto c = ssc::omp_column(X, 0, 1);
  EXPECT_EQ(c.nonZeros(), 1);
  EXPECT_NEAR(c.coeff(3), 1.0, 1e-12);
  EXPECT_LT((X.col(0) - X * Vector(c)).norm(), 1e-12);
}

TEST(OmpColumn, ResidualOrthogonalToSelectedAtoms) {
  std::mt19937_64 gen(102);
  const Matrix X = oracle::random_matrix(gen, 8, 12);
  for (const Index k : {1, 2, 3, 5}) {
    const auto c = ssc::omp_column(X, 4, k);
    const Vector residual = X.col(4) - X * Vector(c);
    for (Eigen::SparseVector<double>::InnerIterator it(c); it; ++it)
      EXPECT_LT(std::abs(X.col(it.index()).dot(residual)), 1e-10);
  }
}

TEST(OmpColumn, NeverSelectsSelfAndRespectsBudget) {
  std::mt19937_64 gen(103);
  const Matrix X = oracle::random_matrix(gen, 6, 10);
  for (Index j = 0; j < 10; ++j) {
    const auto c = ssc::omp_column(X, j, 4);
    EXPECT_EQ(c.coeff(j), 0.0);
    EXPECT_LE(c.nonZeros(), 4);
  }
}

TEST(OmpColumn, GreedyNeverBeatsBruteForce) {
  std::mt19937_64 gen(104);
  for (int trial = 0; trial < 40; ++trial) {
    const Matrix X = oracle::random_matrix(gen, 6, 8);
    const Index j = static_cast<Index>(trial % 8);
    const auto c = ssc::omp_column(X, j, 2);
    const double mine = 0.5 * (X.col(j) - X * Vector(c)).squaredNorm();

    // Exhaustive least squares over all C(7, 2) two-atom supports.
    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> atoms;
    for (Index i = 0; i < 8; ++i)
      if (i != j) atoms.push_back(i);
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      for (std::size_t b = a + 1; b < atoms.size(); ++b) {
        Matrix sub(6, 2);
        sub.col(0) = X.col(atoms[a]);
        sub.col(1) = X.col(atoms[b]);
        const Vector w = sub.completeOrthogonalDecomposition().solve(X.col(j));
        best = std::min(best, 0.5 * (X.col(j) - sub * w).squaredNorm());
      }
    }
    EXPECT_GE(mine, best - 1e-12);
  }
}

TEST(OmpColumn, EarlyExitOnExactRepresentation) {
  std::mt19937_64 gen(105);
  Matrix X = oracle::random_matrix(gen, 5, 7);
  X.col(2) = X.col(6);
  const auto c = ssc::omp_column(X, 2, 5);
  // One atom reproduces the target exactly; no further rounds run.
  EXPECT_EQ(c.nonZeros(), 1);
}

TEST(OmpColumn, RejectsBadArguments) {
  const Matrix X = Matrix::Identity(4, 4);
  EXPECT_THROW(ssc::omp_column(X, 5, 1), std::invalid_argument);
  EXPECT_THROW(ssc::omp_column(X, 0, 0), std::invalid_argument);
  EXPECT_THROW(ssc::omp_column(X, 0, 4), std::invalid_argument);
}

TEST(OmpSolve, DisjointSubspacesAreSubspacePreserving) {
  ssc::SyntheticSpec spec;
  spec.p = 6;
  spec.K = 2;
  spec.r = {1, 1};
  spec.n_per = {5, 5};
  spec.sigma = 0.0;
  spec.rng_seed = 3;
  const ssc::Dataset data = ssc::generate_synthetic(spec);
  const SparseMatrix C = ssc::omp_solve(data.X, 1);
  EXPECT_DOUBLE_EQ(ssc::subspace_preserving_error(C, *data.truth), 0.0);
}

TEST(OmpSolve, RecoversDuplicates) {
  std::mt19937_64 gen(106);
  Matrix X = oracle::random_matrix(gen, 4, 6);
  X = ssc::normalize_columns(X);  // duplicates then maximize |correlation|
  for (Index j = 0; j < 3; ++j) X.col(j + 3) = X.col(j);
  const SparseMatrix C = ssc::omp_solve(X, 1);
  for (Index j = 0; j < 6; ++j) {
    const Index twin = (j + 3) % 6;
    EXPECT_NEAR(C.coeff(twin, j), 1.0, 1e-12);
  }
}

TEST(OmpSolve, ZeroDiagonalAndThreadInvariance) {
  std::mt19937_64 gen(107);
  const Matrix X = oracle::random_matrix(gen, 5, 12);
  const SparseMatrix serial = ssc::omp_solve(X, 3, 1);
  const SparseMatrix parallel = ssc::omp_solve(X, 3, 4);
  EXPECT_TRUE(Matrix(serial).diagonal().isZero(0.0));
  const Matrix diff = Matrix(serial) - Matrix(parallel);
  EXPECT_EQ(diff.lpNorm<Eigen::Infinity>(), 0.0);
}

}  // namespace
