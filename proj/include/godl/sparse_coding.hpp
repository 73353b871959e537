#pragma once

#include <Eigen/Dense>

#include "godl/errors.hpp"

namespace godl {

/// min_x 1/2 ||y - Dx||^2 + lambda ||x||_1
struct LassoProblem {
  Eigen::MatrixXd dictionary;  // m x k
  Eigen::VectorXd target;      // m
  double lambda = 0.0;
};

struct FistaConfig {
  int max_iter = 300;
  double tol = 1e-7;          // relative objective change
  int power_iters = 50;       // Lipschitz estimate: power iteration on D^T D
  double power_tol = 1e-9;
};

/// Elementwise sign(v_i) * max(|v_i| - t, 0).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t);

/// Largest eigenvalue of D^T D by power iteration (deterministic start).
double lipschitz_constant(const Eigen::MatrixXd& dictionary, const FistaConfig& cfg = {});

/// 1/2 ||y - Dx||^2 + lambda ||x||_1.
double lasso_objective(const LassoProblem& p, const Eigen::VectorXd& x);

/// ||y - Dx||^2 + lambda ||x||_1 — the per-frame reconstruction error used
/// by the robust weighting and the unit gates (no 1/2 on the quadratic).
double unit_error(const LassoProblem& p, const Eigen::VectorXd& x);

/// Monotone FISTA (momentum restarts whenever the objective would rise) with
/// fixed step 1/L, cold-started from zero. Deterministic. Throws NonFinite if
/// iterates diverge. Optional precomputed Lipschitz constant `L` (pass <= 0
/// to estimate internally) lets callers reuse it across columns.
Eigen::VectorXd fista_lasso(const LassoProblem& p, const FistaConfig& cfg = {},
                            double L = 0.0);

}  // namespace godl
