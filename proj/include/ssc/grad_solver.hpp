#pragma once

#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "ssc/metrics.hpp"
#include "ssc/parallel.hpp"
#include "ssc/prox.hpp"
#include "ssc/rng.hpp"
#include "ssc/types.hpp"

namespace ssc {

/// Upper bound L = lambda_e * ||X||^2 on the Lipschitz constant of the
/// gradient of (lambda_e/2)||X - XC||_F^2, via power iteration on the smaller
/// Gram side (relative tolerance 1e-6, deterministic start vector).
inline double lipschitz_bound(const Matrix& X, double lambda_e) {
  if (X.size() == 0 || X.isZero(0.0))
    throw std::invalid_argument("lipschitz_bound: X must be nonzero");
  const bool tall = X.rows() >= X.cols();
  const Index dim = tall ? X.cols() : X.rows();

  Rng rng(0x55cc1195u);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = rng.next_normal();
  v.normalize();

  const auto apply = [&](const Vector& u) -> Vector {
    if (tall) return X.transpose() * (X * u);
    return X * (X.transpose() * u);
  };

  double value = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    Vector w = apply(v);
    const double norm = w.norm();
    if (norm == 0.0) {
      // Start vector landed in the null space; redraw.
      for (Index i = 0; i < dim; ++i) v[i] = rng.next_normal();
      v.normalize();
      continue;
    }
    const double next = v.dot(w);  // Rayleigh quotient, ||v|| = 1
    v = w / norm;
    if (iter > 0 && std::abs(next - value) <= 1e-6 * std::abs(next)) {
      value = next;
      break;
    }
    value = next;
  }
  return lambda_e * value;
}

/// One explicit gradient step C - gamma * lambda_e * X^T (XC - X), evaluated
/// as two p x n shaped products (X^T X is never formed).
inline Matrix gradient_step(const Matrix& C, const Matrix& X, double gamma,
                            double lambda_e) {
  if (C.rows() != X.cols() || C.cols() != X.cols())
    throw std::invalid_argument("gradient_step: dimension mismatch");
  const Matrix residual = X * C - X;
  return C - (gamma * lambda_e) * (X.transpose() * residual);
}

struct SolveResult {
  SparseMatrix C;
  SolveTrace trace;
};

namespace detail {

// l0 modes carry no residual weight of their own; the solver runs them with
// an internal lambda_e of 1 (the indicator prox is scale-free, so only the
// gamma * lambda_e product matters and it cancels in gamma = scale / L).
inline double effective_lambda(const GradSolverConfig& cfg) {
  return is_l1(cfg.kind) ? cfg.lambda_e : 1.0;
}

struct BlockResult {
  Matrix C;
  std::vector<double> objective;
  std::vector<double> change_norm;
  int iterations = 0;
};

// Proximal gradient loop over columns [col0, col0 + b) of C. Objectives are
// block-local; the full objective is their sum by column separability.
inline BlockResult solve_block(const Matrix& X, const GradSolverConfig& cfg,
                               double lipschitz, Index col0, Index block_cols) {
  const Index n = X.cols();
  const double lambda = effective_lambda(cfg);
  double gamma = cfg.effective_step_scale() / lipschitz;
  const Matrix target = X.middleCols(col0, block_cols);

  Matrix C = cfg.warm_start ? Matrix(cfg.warm_start->middleCols(col0, block_cols))
                            : Matrix::Zero(n, block_cols);
  const bool accelerated = cfg.accelerate && is_l1(cfg.kind);
  Matrix extrap = C;
  double theta = 1.0;

  const auto block_objective = [&](const Matrix& B) {
    const double residual_sq = (target - X * B).squaredNorm();
    const double l1 = is_l1(cfg.kind) ? B.cwiseAbs().sum() : 0.0;
    return detail::objective_from_residual(l1, residual_sq, cfg.lambda_e, cfg.kind);
  };

  BlockResult out;
  out.objective.push_back(block_objective(C));
  const double divergence_cap = 1e6 * std::max(out.objective.front(), 1.0);
  double epsilon = cfg.epsilon.value_or(0.0);

  for (int t = 0; t < cfg.max_iter; ++t) {
    const Matrix previous = C;

    const Matrix residual = X * extrap - target;
    Matrix stepped = extrap - (gamma * lambda) * (X.transpose() * residual);
    parallel_for(0, block_cols, cfg.threads, [&](std::int64_t j) {
      C.col(j) = prox_column(stepped.col(j), col0 + j, gamma, cfg.k, cfg.kind);
    });

    if (cfg.line_search) {
      // Halve gamma until the quadratic model at the extrapolation point
      // majorizes the smooth part at the new iterate.
      const double f_extrap = 0.5 * lambda * residual.squaredNorm();
      const Matrix grad = lambda * (X.transpose() * residual);
      for (int halvings = 0; halvings < 60; ++halvings) {
        const double f_new = 0.5 * lambda * (X * C - target).squaredNorm();
        const Matrix diff = C - extrap;
        const double model = f_extrap + grad.cwiseProduct(diff).sum() +
                             diff.squaredNorm() / (2.0 * gamma);
        if (f_new <= model + 1e-12 * std::max(1.0, std::abs(model))) break;
        gamma *= 0.5;
        stepped = extrap - (gamma * lambda) * (X.transpose() * residual);
        parallel_for(0, block_cols, cfg.threads, [&](std::int64_t j) {
          C.col(j) = prox_column(stepped.col(j), col0 + j, gamma, cfg.k, cfg.kind);
        });
      }
    }

    const double objective = block_objective(C);
    const double change = (C - previous).norm();
    out.objective.push_back(objective);
    out.change_norm.push_back(change);
    out.iterations = t + 1;

    if (!std::isfinite(objective) || objective > divergence_cap)
      throw NumericalError("proximal gradient solver diverged (objective blow-up)");

    if (t == 0 && !cfg.epsilon) epsilon = 1e-6 * std::max(1.0, change);
    if (change <= epsilon) break;

    if (accelerated) {
      if (objective > out.objective[out.objective.size() - 2]) {
        // Function-value restart: drop momentum.
        theta = 1.0;
        extrap = C;
      } else {
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        extrap = C + ((theta - 1.0) / theta_next) * (C - previous);
        theta = theta_next;
      }
    } else {
      extrap = C;
    }
  }
  out.C = std::move(C);
  return out;
}

}  // namespace detail

/// Proximal gradient descent for all four SSC models. Iterates a gradient
/// step on the smooth fit term followed by the per-column prox of the chosen
/// regularizer; stops when ||C^t - C^{t+1}||_F <= epsilon or at max_iter.
/// The returned C is feasible for its model: zero diagonal, column sums of 1
/// in affine modes, column support <= k in l0 modes. l1 entries with
/// magnitude below 1e-12 are stored as exact zeros.
inline SolveResult solve(const Matrix& X, const GradSolverConfig& cfg) {
  const Index n = X.cols();
  cfg.validate(n);
  const auto start = std::chrono::steady_clock::now();
  const double lipschitz = lipschitz_bound(X, detail::effective_lambda(cfg));

  const Index block = (cfg.column_block > 0) ? std::min(cfg.column_block, n) : n;
  std::vector<detail::BlockResult> blocks;
  for (Index col0 = 0; col0 < n; col0 += block)
    blocks.push_back(detail::solve_block(X, cfg, lipschitz, col0, std::min(block, n - col0)));

  SolveTrace trace;
  for (const auto& b : blocks) trace.iterations_run = std::max(trace.iterations_run, b.iterations);
  trace.objective.assign(trace.iterations_run + 1, 0.0);
  trace.change_norm.assign(trace.iterations_run, 0.0);
  for (const auto& b : blocks) {
    // Converged blocks hold their final value; change contributions are 0.
    for (int t = 0; t <= trace.iterations_run; ++t) {
      const std::size_t idx = std::min<std::size_t>(t, b.objective.size() - 1);
      trace.objective[t] += b.objective[idx];
    }
    for (std::size_t t = 0; t < b.change_norm.size(); ++t) {
      const double c = b.change_norm[t];
      trace.change_norm[t] = std::sqrt(trace.change_norm[t] * trace.change_norm[t] + c * c);
    }
  }

  const double drop_below = is_l1(cfg.kind) ? 1e-12 : 0.0;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const Index col0 = static_cast<Index>(bi) * block;
    const Matrix& C = blocks[bi].C;
    for (Index j = 0; j < C.cols(); ++j)
      for (Index i = 0; i < n; ++i) {
        const double v = C(i, j);
        if (v != 0.0 && std::abs(v) >= drop_below) triplets.emplace_back(i, col0 + j, v);
      }
  }
  SparseMatrix C(n, n);
  C.setFromTriplets(triplets.begin(), triplets.end());

  trace.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return SolveResult{std::move(C), std::move(trace)};
}

/// Stationarity measure ||C - prox_{gamma g}(C - gamma grad f(C))||_F with
/// the solver's own step size and deterministic tie-breaking. Small values
/// certify an approximate fixed point of the iteration.
inline double fixed_point_residual(const Matrix& C, const Matrix& X,
                                   const GradSolverConfig& cfg) {
  const Index n = X.cols();
  cfg.validate(n);
  if (C.rows() != n || C.cols() != n)
    throw std::invalid_argument("fixed_point_residual: C must be n x n");
  const double lambda = detail::effective_lambda(cfg);
  const double gamma = cfg.effective_step_scale() / lipschitz_bound(X, lambda);
  const Matrix stepped = gradient_step(C, X, gamma, lambda);
  Matrix prox(n, n);
  for (Index j = 0; j < n; ++j)
    prox.col(j) = prox_column(stepped.col(j), j, gamma, cfg.k, cfg.kind);
  return (C - prox).norm();
}

inline double fixed_point_residual(const SparseMatrix& C, const Matrix& X,
                                   const GradSolverConfig& cfg) {
  return fixed_point_residual(Matrix(C), X, cfg);
}

}  // namespace ssc
