#include "godl/sparse_coding.hpp"

#include <cmath>

namespace godl {

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - t;
    out[i] = a > 0.0 ? (v[i] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

double lipschitz_constant(const Eigen::MatrixXd& dictionary, const FistaConfig& cfg) {
  const Eigen::Index k = dictionary.cols();
  if (k == 0 || dictionary.rows() == 0) return 0.0;
  // Deterministic start with a mild tilt so structured dictionaries cannot
  // leave the start vector orthogonal to the dominant eigenvector.
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < cfg.power_iters; ++it) {
    Eigen::VectorXd w = dictionary.transpose() * (dictionary * v);
    const double norm = w.norm();
    // Start vector in the null space: fall back to the (safe) Frobenius bound.
    if (norm <= 0.0) return dictionary.squaredNorm() * (1.0 + 1e-6);
    w /= norm;
    const double next = (dictionary * w).squaredNorm();
    if (std::abs(next - lambda) <= cfg.power_tol * std::max(next, 1.0)) {
      lambda = next;
      break;
    }
    lambda = next;
    v = w;
  }
  // Small safety margin: an underestimated L breaks the descent guarantee.
  return lambda * (1.0 + 1e-6);
}

double lasso_objective(const LassoProblem& p, const Eigen::VectorXd& x) {
  return 0.5 * (p.target - p.dictionary * x).squaredNorm() + p.lambda * x.lpNorm<1>();
}

double unit_error(const LassoProblem& p, const Eigen::VectorXd& x) {
  return (p.target - p.dictionary * x).squaredNorm() + p.lambda * x.lpNorm<1>();
}

Eigen::VectorXd fista_lasso(const LassoProblem& p, const FistaConfig& cfg, double L) {
  const Eigen::Index k = p.dictionary.cols();
  if (p.lambda < 0.0) throw InvalidConfig("fista_lasso: lambda must be >= 0");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  if (L <= 0.0) L = lipschitz_constant(p.dictionary, cfg);
  if (L <= 0.0) return x;  // zero dictionary: least-norm solution is 0

  const double step = 1.0 / L;
  Eigen::VectorXd y = x;
  double t = 1.0;
  double obj_prev = lasso_objective(p, x);

  for (int it = 0; it < cfg.max_iter; ++it) {
    Eigen::VectorXd grad = p.dictionary.transpose() * (p.dictionary * y - p.target);
    Eigen::VectorXd x_next = soft_threshold(y - step * grad, step * p.lambda);
    double obj = lasso_objective(p, x_next);

    if (obj > obj_prev) {
      // Monotone restart: momentum overshot; take a plain proximal step
      // from the last accepted iterate instead.
      grad = p.dictionary.transpose() * (p.dictionary * x - p.target);
      x_next = soft_threshold(x - step * grad, step * p.lambda);
      obj = lasso_objective(p, x_next);
      t = 1.0;
      if (obj > obj_prev) {  // no descent possible within float precision
        break;
      }
    }
    if (!std::isfinite(obj)) throw NonFinite("fista_lasso: objective diverged");

    const bool converged = std::abs(obj_prev - obj) <= cfg.tol * std::max(obj_prev, 1e-12);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = x_next;
    t = t_next;
    obj_prev = obj;
    if (converged) break;
  }
  if (!x.allFinite()) throw NonFinite("fista_lasso: iterates diverged");
  return x;
}

}  // namespace godl
