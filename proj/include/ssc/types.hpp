#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

/// Cluster assignment per point, values in [0, K).
using Labels = std::vector<int>;

/// A solver diverged or produced non-finite values.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read, written, or parsed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The four per-column regularizers: l1 or l0 sparsity, with or without the
/// affine constraint c^T 1 = 1.
enum class ModelKind { L1Linear, L1Affine, L0Linear, L0Affine };

constexpr bool is_l1(ModelKind kind) {
  return kind == ModelKind::L1Linear || kind == ModelKind::L1Affine;
}

constexpr bool is_affine(ModelKind kind) {
  return kind == ModelKind::L1Affine || kind == ModelKind::L0Affine;
}

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::L1Linear: return "l1-linear";
    case ModelKind::L1Affine: return "l1-affine";
    case ModelKind::L0Linear: return "l0-linear";
    case ModelKind::L0Affine: return "l0-affine";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& name) {
  if (name == "l1-linear") return ModelKind::L1Linear;
  if (name == "l1-affine") return ModelKind::L1Affine;
  if (name == "l0-linear") return ModelKind::L0Linear;
  if (name == "l0-affine") return ModelKind::L0Affine;
  throw std::invalid_argument("unknown model kind: " + name);
}

/// Per-iteration history of one solver run.
///
/// For the proximal gradient solver, objective[t] is the model objective at
/// iterate t (index 0 is the starting point, so the vector has
/// iterations_run + 1 entries) and change_norm[t] = ||C^{t+1} - C^t||_F.
/// ADMM records ||A - C||_F in change_norm and, in affine mode,
/// ||A^T 1 - 1||_2 in aux_residual; it leaves objective empty.
struct SolveTrace {
  std::vector<double> objective;
  std::vector<double> change_norm;
  std::vector<double> aux_residual;
  int iterations_run = 0;
  double wall_time_s = 0.0;
};

/// Configuration of the proximal gradient solver. Exactly the parameters the
/// chosen model needs must be set: lambda_e for l1 modes, k for l0 modes.
struct GradSolverConfig {
  ModelKind kind = ModelKind::L1Affine;
  double lambda_e = 0.0;  ///< residual weight, l1 modes only
  Index k = 0;            ///< per-column sparsity budget, l0 modes only

  /// Stop when ||C^t - C^{t+1}||_F <= epsilon. Unset: scale-free default
  /// 1e-6 * max(1, ||C^1 - C^0||_F) fixed after the first iteration.
  std::optional<double> epsilon;
  int max_iter = 500;

  bool accelerate = false;  ///< Nesterov momentum + function-value restart (l1 modes; l0 runs plain)
  double step_scale = 0.0;  ///< gamma = step_scale / L; 0 = auto (1.0 l1, 0.99 l0)
  bool line_search = false; ///< halve gamma until the quadratic majorization holds

  Index column_block = 0;   ///< solve this many columns at a time; 0 = all at once
  std::optional<Matrix> warm_start;  ///< C^0, defaults to zero
  int threads = 1;          ///< worker threads for the per-column prox phase

  double effective_step_scale() const {
    if (step_scale > 0.0) return step_scale;
    return is_l1(kind) ? 1.0 : 0.99;
  }

  void validate(Index n) const {
    if (n < 2) throw std::invalid_argument("solver needs at least 2 data points");
    if (is_l1(kind)) {
      if (lambda_e <= 0.0) throw std::invalid_argument("l1 models require lambda_e > 0");
      if (k != 0) throw std::invalid_argument("k is not a parameter of l1 models");
    } else {
      if (k < 1 || k > n - 1)
        throw std::invalid_argument("l0 models require 1 <= k <= n-1");
      if (lambda_e != 0.0)
        throw std::invalid_argument("lambda_e is not a parameter of l0 models");
    }
    if (epsilon && *epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (step_scale < 0.0 || step_scale > 1.0)
      throw std::invalid_argument("step_scale must lie in (0, 1]");
    if (column_block < 0) throw std::invalid_argument("column_block must be >= 0");
    if (warm_start && (warm_start->rows() != n || warm_start->cols() != n))
      throw std::invalid_argument("warm_start must be n x n");
  }
};

}  // namespace ssc
