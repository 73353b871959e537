#pragma once

#include <Eigen/Dense>
#include <vector>

#include "godl/errors.hpp"
#include "godl/rng.hpp"
#include "godl/segmentation.hpp"
#include "godl/sparse_coding.hpp"

namespace godl {

/// One action unit's atom matrix; every column has l2 norm <= 1 + 1e-12.
struct Dictionary {
  Eigen::MatrixXd atoms;  // m x k
  int unit_index = 0;     // 1..N

  int atom_count() const { return static_cast<int>(atoms.cols()); }
  void check_norms() const;  // throws InvalidConfig on violated norm bound
};

/// Sufficient statistics of the quadratic surrogate for a fixed code matrix:
/// E = Y_hat X_hat^T, F = X_hat X_hat^T.
struct SurrogateStats {
  Eigen::MatrixXd E;  // m x k
  Eigen::MatrixXd F;  // k x k, symmetric PSD
};

SurrogateStats make_surrogate(const Eigen::MatrixXd& y_hat, const Eigen::MatrixXd& x_hat);

/// -2 tr(E^T D) + tr(D F D^T); differs from ||Y_hat - D X_hat||_F^2 only by
/// the constant tr(Y_hat^T Y_hat).
double surrogate_value(const Dictionary& d, const SurrogateStats& stats);

struct OdlConfig {
  double lambda = 0.1;
  int inner_max_iter = 20;
  double conv_tol = 1e-5;                       // relative objective change
  std::vector<int> atom_dims = {4, 5, 6, 10, 13};
  FistaConfig fista;
};

/// Seeds a dictionary by sampling k data columns without replacement (with
/// replacement once k exceeds the column count), normalizing each; zero draws
/// become seeded random unit directions.
Dictionary init_dictionary(const SubSequence& sub, int k, std::uint64_t seed);

/// Sparse-codes every column of y_hat against D with its own regularizer
/// lambda_w[j]. Columns are independent.
Eigen::MatrixXd update_coefficients(const Dictionary& d, const Eigen::MatrixXd& y_hat,
                                    const Eigen::VectorXd& lambda_w,
                                    const FistaConfig& cfg = {});

/// One full block-coordinate sweep over atoms:
///   u_j = (e_j - D f_j)/F_jj + d_j,  d_j = u_j / max(1, ||u_j||)
/// Atoms with F_jj <= 1e-10 are left untouched. Never increases the
/// surrogate; keeps every norm within the unit ball.
Dictionary update_dictionary(const Dictionary& d, const SurrogateStats& stats);

struct OdlFitResult {
  Dictionary dictionary;
  Eigen::MatrixXd coefficients;       // k x n
  std::vector<double> objective_trace;  // weighted lasso objective per iteration
};

/// Alternates update_coefficients / update_dictionary on the weighted columns
/// until the summed per-column objective
///   sum_j 1/2 ||y_hat_j - D x_j||^2 + lambda_w[j] ||x_j||_1
/// stalls (relative change < conv_tol) or inner_max_iter is hit. The trace is
/// non-increasing; a fresh code is kept per column only when it does not
/// worsen that column's objective.
OdlFitResult odl_fit(const Eigen::MatrixXd& y_hat, const Eigen::VectorXd& lambda_w,
                     const Dictionary& d0, const OdlConfig& cfg);

}  // namespace godl
