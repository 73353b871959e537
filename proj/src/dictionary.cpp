#include "godl/dictionary.hpp"

#include <cmath>

namespace godl {

void Dictionary::check_norms() const {
  for (Eigen::Index j = 0; j < atoms.cols(); ++j)
    if (atoms.col(j).norm() > 1.0 + 1e-12 || !atoms.col(j).allFinite())
      throw InvalidConfig("dictionary atom " + std::to_string(j) + " violates the norm bound");
}

SurrogateStats make_surrogate(const Eigen::MatrixXd& y_hat, const Eigen::MatrixXd& x_hat) {
  SurrogateStats s;
  s.E = y_hat * x_hat.transpose();
  s.F = x_hat * x_hat.transpose();
  return s;
}

double surrogate_value(const Dictionary& d, const SurrogateStats& stats) {
  return -2.0 * (stats.E.transpose() * d.atoms).trace() +
         (d.atoms * stats.F * d.atoms.transpose()).trace();
}

Dictionary init_dictionary(const SubSequence& sub, int k, std::uint64_t seed) {
  const int n = static_cast<int>(sub.columns.cols());
  if (n < 1) throw InvalidConfig("init_dictionary: empty sub-sequence");
  if (k < 1) throw InvalidConfig("init_dictionary: k must be >= 1");

  Rng rng(seed);
  std::vector<int> picks;
  if (k <= n) {
    picks = rng.sample_without_replacement(n, k);
  } else {
    picks.reserve(k);
    for (int i = 0; i < k; ++i) picks.push_back(static_cast<int>(rng.below(n)));
  }

  Dictionary d;
  d.unit_index = sub.unit_index;
  d.atoms.resize(sub.columns.rows(), k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd col = sub.columns.col(picks[j]);
    double norm = col.norm();
    if (norm <= 1e-12) {
      for (Eigen::Index i = 0; i < col.size(); ++i) col[i] = rng.normal();
      norm = col.norm();
    }
    d.atoms.col(j) = col / norm;
  }
  return d;
}

Eigen::MatrixXd update_coefficients(const Dictionary& d, const Eigen::MatrixXd& y_hat,
                                    const Eigen::VectorXd& lambda_w, const FistaConfig& cfg) {
  if (y_hat.cols() != lambda_w.size())
    throw InvalidConfig("update_coefficients: column/regularizer count mismatch");
  if (y_hat.rows() != d.atoms.rows())
    throw InvalidConfig("update_coefficients: row dimension mismatch");

  const double L = lipschitz_constant(d.atoms, cfg);
  Eigen::MatrixXd x(d.atoms.cols(), y_hat.cols());
  for (Eigen::Index j = 0; j < y_hat.cols(); ++j) {
    LassoProblem p{d.atoms, y_hat.col(j), lambda_w[j]};
    x.col(j) = fista_lasso(p, cfg, L);
  }
  return x;
}

Dictionary update_dictionary(const Dictionary& d, const SurrogateStats& stats) {
  if (stats.F.rows() != d.atoms.cols() || stats.E.cols() != d.atoms.cols() ||
      stats.E.rows() != d.atoms.rows())
    throw InvalidConfig("update_dictionary: statistics dimension mismatch");

  Dictionary out = d;
  for (Eigen::Index j = 0; j < out.atoms.cols(); ++j) {
    const double fjj = stats.F(j, j);
    if (fjj <= 1e-10) continue;  // atom unused by the current codes
    Eigen::VectorXd u =
        (stats.E.col(j) - out.atoms * stats.F.col(j)) / fjj + out.atoms.col(j);
    out.atoms.col(j) = u / std::max(1.0, u.norm());
  }
  return out;
}

OdlFitResult odl_fit(const Eigen::MatrixXd& y_hat, const Eigen::VectorXd& lambda_w,
                     const Dictionary& d0, const OdlConfig& cfg) {
  if (y_hat.cols() != lambda_w.size())
    throw InvalidConfig("odl_fit: column/regularizer count mismatch");

  const Eigen::Index n = y_hat.cols();
  OdlFitResult r;
  r.dictionary = d0;
  r.coefficients = Eigen::MatrixXd::Zero(d0.atoms.cols(), n);

  auto column_objective = [&](const Dictionary& d, const Eigen::VectorXd& x,
                              Eigen::Index j) {
    return 0.5 * (y_hat.col(j) - d.atoms * x).squaredNorm() + lambda_w[j] * x.lpNorm<1>();
  };
  auto total_objective = [&](const Dictionary& d, const Eigen::MatrixXd& x) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += column_objective(d, x.col(j), j);
    return s;
  };

  double obj = total_objective(r.dictionary, r.coefficients);
  for (int it = 0; it < cfg.inner_max_iter; ++it) {
    // Sparse coding with the dictionary fixed. FISTA solves each column to a
    // tolerance, so a fresh code is kept only when it does not worsen that
    // column; this keeps the alternation monotone.
    Eigen::MatrixXd x_new = update_coefficients(r.dictionary, y_hat, lambda_w, cfg.fista);
    for (Eigen::Index j = 0; j < n; ++j)
      if (column_objective(r.dictionary, x_new.col(j), j) >
          column_objective(r.dictionary, r.coefficients.col(j), j))
        x_new.col(j) = r.coefficients.col(j);
    r.coefficients = std::move(x_new);

    // Dictionary update with the codes fixed (never increases the quadratic
    // part; the l1 part does not depend on the dictionary).
    r.dictionary = update_dictionary(r.dictionary, make_surrogate(y_hat, r.coefficients));

    const double next = total_objective(r.dictionary, r.coefficients);
    r.objective_trace.push_back(next);
    const bool converged = std::abs(obj - next) <= cfg.conv_tol * std::max(obj, 1e-12);
    obj = next;
    if (converged) break;
  }
  return r;
}

}  // namespace godl
