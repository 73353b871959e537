#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "godl/dictionary.hpp"
#include "godl/errors.hpp"
#include "godl/segmentation.hpp"

namespace godl {

/// Graduated non-convexity schedule parameters. c2 is the largest squared
/// error still accepted as an inlier; frames whose final weight clears
/// inlier_weight_cutoff contribute to the unit's error statistics.
struct GncConfig {
  double c2 = 0.5;
  double mu_divisor = 1.4;
  double inlier_weight_cutoff = 0.6;
};

/// Geman-McClure cost mu*c2*e2 / (mu*c2 + e2): quadratic near zero,
/// saturating at mu*c2 for large errors.
double gm_cost(double e2, double mu, double c2);

/// Sparse-codes one ORIGINAL (unweighted) column against D and returns the
/// reconstruction error ||y - Dx||^2 + lambda ||x||_1 together with the code.
std::pair<double, Eigen::VectorXd> frame_error(const Eigen::VectorXd& y, const Dictionary& d,
                                               double lambda, const FistaConfig& cfg = {},
                                               double L = 0.0);

/// mu0 = 2 * max(e2) / c2. Values below 1 still yield one outer iteration.
double init_mu(const Eigen::VectorXd& errors, double c2);

/// Closed-form minimizer of the weighted cost + GM penalty:
/// w_j = mu*c2 / (mu*c2 + e2_j), clamped to [0,1].
Eigen::VectorXd update_weights(const Eigen::VectorXd& errors, double mu, double c2);

/// The mu values an outer loop visits: mu0, mu0/1.4, ... down to the last
/// value >= 1 (just {mu0} when mu0 < 1).
std::vector<double> mu_schedule(double mu0, double divisor);

/// Per-outer-iteration snapshot kept for diagnostics and tests.
struct TrainTraceEntry {
  double mu = 0.0;
  Eigen::VectorXd weights;  // state entering this iteration's weighted fit
  double max_error = 0.0;
};

struct UnitTrainResult {
  Dictionary dictionary;
  Eigen::VectorXd weights;   // final per-frame weights
  double e_mean = 0.0;       // over inlier frames only
  double e_std = 0.0;
  std::string unit_label;
  std::vector<TrainTraceEntry> trace;
};

enum class Trainer { Godl, Odl };

/// Robust unit training: weights start at 1, the dictionary at sampled data
/// columns; each outer iteration fits weighted ODL on Y_hat = Y * diag(w)
/// with per-column lambda*w, re-measures errors on the unweighted columns,
/// updates weights in closed form, and divides mu by 1.4 until it falls
/// below 1. Throws AllOutliers when no frame survives the inlier cutoff.
UnitTrainResult godl_train(const SubSequence& sub, const OdlConfig& odl_cfg,
                           const GncConfig& gnc_cfg, std::uint64_t seed);

/// Plain (non-robust) baseline: a single odl_fit with all weights 1;
/// statistics over all frames. Same result shape so the two trainers are
/// interchangeable downstream.
UnitTrainResult odl_train(const SubSequence& sub, const OdlConfig& odl_cfg,
                          const GncConfig& gnc_cfg, std::uint64_t seed);

}  // namespace godl
