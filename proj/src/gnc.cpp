#include "godl/gnc.hpp"

#include <algorithm>
#include <cmath>

namespace godl {

double gm_cost(double e2, double mu, double c2) {
  if (e2 < 0.0) throw InvalidConfig("gm_cost: e2 must be >= 0");
  if (mu <= 0.0 || c2 <= 0.0) throw InvalidConfig("gm_cost: mu and c2 must be > 0");
  return mu * c2 * e2 / (mu * c2 + e2);
}

std::pair<double, Eigen::VectorXd> frame_error(const Eigen::VectorXd& y, const Dictionary& d,
                                               double lambda, const FistaConfig& cfg, double L) {
  LassoProblem p{d.atoms, y, lambda};
  Eigen::VectorXd x = fista_lasso(p, cfg, L);
  return {unit_error(p, x), std::move(x)};
}

double init_mu(const Eigen::VectorXd& errors, double c2) {
  if (errors.size() == 0) throw InvalidConfig("init_mu: empty error vector");
  if (c2 <= 0.0) throw InvalidConfig("init_mu: c2 must be > 0");
  return 2.0 * errors.maxCoeff() / c2;
}

Eigen::VectorXd update_weights(const Eigen::VectorXd& errors, double mu, double c2) {
  if (mu <= 0.0 || c2 <= 0.0) throw InvalidConfig("update_weights: mu and c2 must be > 0");
  Eigen::VectorXd w(errors.size());
  for (Eigen::Index j = 0; j < errors.size(); ++j) {
    const double v = mu * c2 / (mu * c2 + errors[j]);
    w[j] = std::clamp(v, 0.0, 1.0);
  }
  return w;
}

std::vector<double> mu_schedule(double mu0, double divisor) {
  if (divisor <= 1.0) throw InvalidConfig("mu_schedule: divisor must be > 1");
  std::vector<double> out;
  if (mu0 < 1.0) {
    out.push_back(mu0);  // near-perfect initial fit: still run one iteration
    return out;
  }
  for (double mu = mu0; mu >= 1.0; mu /= divisor) out.push_back(mu);
  return out;
}

namespace {

Eigen::VectorXd all_frame_errors(const Eigen::MatrixXd& columns, const Dictionary& d,
                                 double lambda, const FistaConfig& cfg) {
  const double L = lipschitz_constant(d.atoms, cfg);
  Eigen::VectorXd e(columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j)
    e[j] = frame_error(columns.col(j), d, lambda, cfg, L).first;
  return e;
}

void inlier_stats(const Eigen::VectorXd& errors, const Eigen::VectorXd& weights, double cutoff,
                  double& e_mean, double& e_std) {
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index j = 0; j < errors.size(); ++j)
    if (weights[j] >= cutoff) {
      sum += errors[j];
      ++count;
    }
  if (count == 0) throw AllOutliers("no frame reached the inlier weight cutoff");
  e_mean = sum / count;
  double var = 0.0;
  for (Eigen::Index j = 0; j < errors.size(); ++j)
    if (weights[j] >= cutoff) {
      const double d = errors[j] - e_mean;
      var += d * d;
    }
  e_std = std::sqrt(var / count);
}

int atoms_for_unit(const OdlConfig& cfg, int unit_index) {
  if (cfg.atom_dims.empty()) throw InvalidConfig("atom_dims must not be empty");
  const int i = ((unit_index - 1) % static_cast<int>(cfg.atom_dims.size()) +
                 static_cast<int>(cfg.atom_dims.size())) %
                static_cast<int>(cfg.atom_dims.size());
  const int k = cfg.atom_dims[i];
  if (k < 1) throw InvalidConfig("atom_dims entries must be positive");
  return k;
}

}  // namespace

UnitTrainResult godl_train(const SubSequence& sub, const OdlConfig& odl_cfg,
                           const GncConfig& gnc_cfg, std::uint64_t seed) {
  const Eigen::Index n = sub.columns.cols();
  if (n == 0) throw InvalidConfig("godl_train: empty sub-sequence");
  if (!(gnc_cfg.c2 > 0.0)) throw InvalidConfig("godl_train: c2 must be > 0");

  UnitTrainResult r;
  r.dictionary = init_dictionary(sub, atoms_for_unit(odl_cfg, sub.unit_index), seed);
  r.weights = Eigen::VectorXd::Ones(n);

  Eigen::VectorXd errors =
      all_frame_errors(sub.columns, r.dictionary, odl_cfg.lambda, odl_cfg.fista);
  const double mu0 = init_mu(errors, gnc_cfg.c2);

  for (double mu : mu_schedule(mu0, gnc_cfg.mu_divisor)) {
    TrainTraceEntry t;
    t.mu = mu;
    t.weights = r.weights;
    t.max_error = errors.maxCoeff();
    r.trace.push_back(std::move(t));

    // Weighted fit: scale the columns and the per-column regularizers.
    Eigen::MatrixXd y_hat = sub.columns * r.weights.asDiagonal();
    Eigen::VectorXd lambda_w = odl_cfg.lambda * r.weights;
    OdlFitResult fit = odl_fit(y_hat, lambda_w, r.dictionary, odl_cfg);
    r.dictionary = std::move(fit.dictionary);

    // Re-measure every ORIGINAL (unweighted) column against the new
    // dictionary, then refresh the weights. The weight law is evaluated at
    // max(mu, 1): the schedule never targets surrogates weaker than the
    // mu = 1 cost, so a sub-1 initialization must not inflate errors into
    // artificial outliers.
    errors = all_frame_errors(sub.columns, r.dictionary, odl_cfg.lambda, odl_cfg.fista);
    r.weights = update_weights(errors, std::max(mu, 1.0), gnc_cfg.c2);
  }

  inlier_stats(errors, r.weights, gnc_cfg.inlier_weight_cutoff, r.e_mean, r.e_std);
  return r;
}

UnitTrainResult odl_train(const SubSequence& sub, const OdlConfig& odl_cfg,
                          const GncConfig& gnc_cfg, std::uint64_t seed) {
  const Eigen::Index n = sub.columns.cols();
  if (n == 0) throw InvalidConfig("odl_train: empty sub-sequence");
  (void)gnc_cfg;

  UnitTrainResult r;
  r.dictionary = init_dictionary(sub, atoms_for_unit(odl_cfg, sub.unit_index), seed);
  r.weights = Eigen::VectorXd::Ones(n);

  OdlFitResult fit =
      odl_fit(sub.columns, Eigen::VectorXd::Constant(n, odl_cfg.lambda), r.dictionary, odl_cfg);
  r.dictionary = std::move(fit.dictionary);

  // Non-robust baseline: every frame is an inlier and contributes to the
  // gate statistics.
  Eigen::VectorXd errors =
      all_frame_errors(sub.columns, r.dictionary, odl_cfg.lambda, odl_cfg.fista);
  inlier_stats(errors, r.weights, 0.0, r.e_mean, r.e_std);
  return r;
}

}  // namespace godl
