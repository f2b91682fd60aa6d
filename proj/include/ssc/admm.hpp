#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <utility>

#include "ssc/prox.hpp"
#include "ssc/types.hpp"

namespace ssc {

/// Data-dependent coherence mu = min_i max_{j != i} |x_i^T x_j|, used to set
/// lambda_e = alpha / mu.
inline double mu_heuristic(const Matrix& X) {
  const Index n = X.cols();
  if (n < 2) throw std::invalid_argument("mu_heuristic: need at least 2 points");
  const Matrix gram = X.transpose() * X;
  double mu = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    double row_max = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      row_max = std::max(row_max, std::abs(gram(i, j)));
    }
    mu = std::min(mu, row_max);
  }
  if (mu == 0.0)
    throw NumericalError("mu_heuristic: degenerate mu = 0 (a point is orthogonal to all others)");
  return mu;
}

enum class AdmmVariant { Naive, Fast };

struct AdmmConfig {
  double alpha = 10.0;     ///< lambda_e = alpha / mu(X) unless lambda_e is set
  double lambda_e = 0.0;   ///< 0 = derive from alpha
  double rho = 0.0;        ///< penalty parameter; 0 = default to alpha
  int max_iter = 200;      ///< fixed iteration budget
  AdmmVariant variant = AdmmVariant::Fast;
  bool affine = true;
  std::optional<double> stop_tol;  ///< optional residual stopping, off by default

  void validate() const {
    if (lambda_e == 0.0 && alpha <= 1.0)
      throw std::invalid_argument("admm: alpha must be > 1 when lambda_e is derived");
    if (lambda_e < 0.0) throw std::invalid_argument("admm: lambda_e must be positive");
    if (rho < 0.0) throw std::invalid_argument("admm: rho must be positive");
    if (max_iter < 1) throw std::invalid_argument("admm: max_iter must be >= 1");
    if (stop_tol && *stop_tol <= 0.0) throw std::invalid_argument("admm: stop_tol must be positive");
  }
};

struct AdmmState {
  Matrix A;      ///< auxiliary primal
  Matrix C;      ///< sparse-coefficient primal
  Matrix Delta;  ///< dual for A = C - diag(C)
  Vector delta;  ///< dual for A^T 1 = 1 (affine mode)

  static AdmmState zero(Index n) {
    return AdmmState{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n),
                     Vector::Zero(n)};
  }
  bool all_finite() const {
    return A.allFinite() && C.allFinite() && Delta.allFinite() && delta.allFinite();
  }
};

/// Cholesky factor of the (p+1)-sized SMW core for the normal-equation solve
/// (lambda_e X^T X + rho I [+ rho 1 1^T]) A = RHS. Xt is sqrt(lambda_e) X
/// with a sqrt(rho) ones row appended in affine mode.
struct SmwFactor {
  Eigen::LLT<Matrix> core;  ///< factor of I + rho^{-1} Xt Xt^T
  Matrix Xt;
  double rho = 0.0;
};

inline SmwFactor smw_precompute(const Matrix& X, double lambda_e, double rho, bool affine) {
  if (rho <= 0.0) throw std::invalid_argument("smw_precompute: rho must be positive");
  const Index p = X.rows();
  const Index n = X.cols();
  Matrix Xt(affine ? p + 1 : p, n);
  Xt.topRows(p) = std::sqrt(lambda_e) * X;
  if (affine) Xt.row(p).setConstant(std::sqrt(rho));
  const Index q = Xt.rows();
  Matrix core = Matrix::Identity(q, q) + (Xt * Xt.transpose()) / rho;
  SmwFactor factor{Eigen::LLT<Matrix>(core), std::move(Xt), rho};
  if (factor.core.info() != Eigen::Success)
    throw NumericalError("smw_precompute: Cholesky factorization failed");
  return factor;
}

/// Applies (lambda_e X^T X + rho I [+ rho 1 1^T])^{-1} to RHS as
/// rho^{-1} RHS - rho^{-2} Xt^T (M (Xt RHS)) without forming the n x n inverse.
inline Matrix smw_apply(const SmwFactor& factor, const Matrix& rhs) {
  if (rhs.rows() != factor.Xt.cols())
    throw std::invalid_argument("smw_apply: dimension mismatch");
  const Matrix projected = factor.core.solve(factor.Xt * rhs);
  return rhs / factor.rho -
         (factor.Xt.transpose() * projected) / (factor.rho * factor.rho);
}

/// Precomputed per-solve data: the constant part of the normal-equation
/// right-hand side plus either the SMW factor (Fast) or a dense inverse
/// (Naive).
struct AdmmWorkspace {
  AdmmConfig resolved;  ///< config with lambda_e and rho filled in
  Matrix rhs_const;     ///< lambda_e X^T X [+ rho 1 1^T]
  std::optional<SmwFactor> smw;
  Matrix naive_inverse;
};

inline AdmmWorkspace admm_setup(const Matrix& X, const AdmmConfig& config) {
  config.validate();
  AdmmWorkspace w;
  w.resolved = config;
  if (w.resolved.lambda_e == 0.0) w.resolved.lambda_e = config.alpha / mu_heuristic(X);
  if (w.resolved.rho == 0.0) w.resolved.rho = config.alpha;

  const Index n = X.cols();
  w.rhs_const = w.resolved.lambda_e * (X.transpose() * X);
  if (config.affine) w.rhs_const.array() += w.resolved.rho;

  if (config.variant == AdmmVariant::Fast) {
    w.smw = smw_precompute(X, w.resolved.lambda_e, w.resolved.rho, config.affine);
  } else {
    Matrix lhs = w.rhs_const;  // lambda_e X^T X [+ rho 1 1^T]
    lhs.diagonal().array() += w.resolved.rho;
    w.naive_inverse = lhs.llt().solve(Matrix::Identity(n, n));
  }
  return w;
}

/// One ADMM iteration: normal-equation A-update, elementwise shrinkage
/// C-update with the diagonal zeroed, then dual ascent on Delta (and delta in
/// affine mode). Every sub-step is column-separable, so the update runs over
/// column slices sized to stay cache-resident; the math is unchanged.
///
/// Writes into `next`, reusing its buffers when already sized; `next` must
/// not alias `state`. The solve loop ping-pongs two states so the steady
/// state allocates nothing of O(n^2).
inline void admm_step_into(const AdmmState& state, const AdmmWorkspace& w, AdmmState& next) {
  if (!state.all_finite()) throw NumericalError("admm_step: non-finite state");
  const double rho = w.resolved.rho;
  const double eta = 1.0 / rho;
  const Index n = state.C.rows();

  next.A.resize(n, n);
  next.C.resize(n, n);
  next.Delta.resize(n, n);
  next.delta = state.delta;

  // ~0.5 MB column slices keep the A panel L2-resident across its five passes.
  const Index block = std::min(n, std::max<Index>(16, 65536 / std::max<Index>(n, 1)));
  for (Index j0 = 0; j0 < n; j0 += block) {
    const Index b = std::min(block, n - j0);
    auto A = next.A.middleCols(j0, b);

    if (w.smw) {
      // Build rhs / rho directly so the SMW correction needs no rescale of A:
      // solve = rhs/rho - Xt^T (M (Xt rhs/rho)) / rho.
      A = (w.rhs_const.middleCols(j0, b) + rho * state.C.middleCols(j0, b) -
           state.Delta.middleCols(j0, b)) *
          eta;
      if (w.resolved.affine) A.rowwise() -= eta * state.delta.segment(j0, b).transpose();
      Matrix projected = w.smw->Xt * A;  // (p+1) x b core product
      projected = w.smw->core.solve(projected);
      projected *= eta;
      A.noalias() -= w.smw->Xt.transpose() * projected;
    } else {
      Matrix rhs = w.rhs_const.middleCols(j0, b) + rho * state.C.middleCols(j0, b) -
                   state.Delta.middleCols(j0, b);
      if (w.resolved.affine) rhs.rowwise() -= state.delta.segment(j0, b).transpose();
      A.noalias() = w.naive_inverse * rhs;
    }

    auto C = next.C.middleCols(j0, b);
    // Branch-free shrinkage so the pass vectorizes: sign(s) * max(|s|-eta, 0).
    const auto shifted = (A.array() + eta * state.Delta.middleCols(j0, b).array());
    C = ((shifted.abs() - eta).max(0.0) * shifted.sign()).matrix();
    for (Index t = 0; t < b; ++t) C(j0 + t, t) = 0.0;

    next.Delta.middleCols(j0, b) =
        state.Delta.middleCols(j0, b) + rho * (A - C);
    if (w.resolved.affine)
      next.delta.segment(j0, b) +=
          rho * (A.colwise().sum().transpose() - Vector::Ones(b));
  }
}

inline AdmmState admm_step(const AdmmState& state, const AdmmWorkspace& w) {
  AdmmState next;
  admm_step_into(state, w, next);
  return next;
}

struct AdmmResult {
  SparseMatrix C;
  SolveTrace trace;
};

/// Runs ADMM for the configured iteration budget from a zero start. The trace
/// records the consensus residual ||A - C||_F per iteration and, in affine
/// mode, ||A^T 1 - 1||_2.
inline AdmmResult admm_solve(const Matrix& X, const AdmmConfig& config) {
  const Index n = X.cols();
  if (n < 2) throw std::invalid_argument("admm_solve: need at least 2 points");
  const auto start = std::chrono::steady_clock::now();
  const AdmmWorkspace w = admm_setup(X, config);

  AdmmState state = AdmmState::zero(n);
  AdmmState scratch;
  SolveTrace trace;
  double residual_cap = 0.0;
  for (int t = 0; t < config.max_iter; ++t) {
    admm_step_into(state, w, scratch);
    std::swap(state, scratch);
    const double consensus = (state.A - state.C).norm();
    trace.change_norm.push_back(consensus);
    double affine_residual = 0.0;
    if (config.affine) {
      affine_residual = (state.A.transpose() * Vector::Ones(n) - Vector::Ones(n)).norm();
      trace.aux_residual.push_back(affine_residual);
    }
    trace.iterations_run = t + 1;

    if (!std::isfinite(consensus)) throw NumericalError("admm_solve: diverged");
    if (t == 0) residual_cap = 1e8 * std::max(1.0, consensus);
    if (consensus > residual_cap) throw NumericalError("admm_solve: diverged");

    if (config.stop_tol && consensus <= *config.stop_tol &&
        (!config.affine || affine_residual <= *config.stop_tol))
      break;
  }

  SparseMatrix C = state.C.sparseView();
  trace.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return AdmmResult{std::move(C), std::move(trace)};
}

/// Closest point with unit coordinate sum: c_bar - nu 1 with
/// nu = (c_bar^T 1 - 1)/(n-1). Same map as project_hyperplane; kept under the
/// evaluation-protocol name.
inline Vector feasibility_projection(const Vector& c_bar) {
  return project_hyperplane(c_bar);
}

/// Applies the feasibility projection column-wise to a full coefficient
/// matrix (entry j of column j stays pinned at zero). Used only when
/// evaluating metrics on iterates that do not satisfy the affine constraint.
inline Matrix project_affine_feasible(const Matrix& C) {
  const Index n = C.cols();
  if (C.rows() != n) throw std::invalid_argument("project_affine_feasible: C must be square");
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    Vector column(n - 1);
    column.head(j) = C.col(j).head(j);
    column.tail(n - 1 - j) = C.col(j).tail(n - 1 - j);
    const Vector projected = feasibility_projection(column);
    out.col(j).head(j) = projected.head(j);
    out(j, j) = 0.0;
    out.col(j).tail(n - 1 - j) = projected.tail(n - 1 - j);
  }
  return out;
}

inline Matrix project_affine_feasible(const SparseMatrix& C) {
  return project_affine_feasible(Matrix(C));
}

}  // namespace ssc
