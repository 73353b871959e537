#include <doctest.h>

#include "godl/dictionary.hpp"
#include "godl/rng.hpp"
#include "oracles.hpp"

using namespace godl;

namespace {

SubSequence make_sub(const Eigen::MatrixXd& cols, int unit_index = 1) {
  SubSequence s;
  s.unit_index = unit_index;
  s.columns = cols;
  return s;
}

}  // namespace

TEST_CASE("init_dictionary with k distinct unit columns permutes them") {
  Eigen::MatrixXd cols = Eigen::MatrixXd::Identity(4, 4);
  auto d = init_dictionary(make_sub(cols), 4, 3);
  REQUIRE(d.atom_count() == 4);
  d.check_norms();
  // Every atom must be one of the original unit columns, and all four must
  // appear (sampling is without replacement).
  std::vector<bool> seen(4, false);
  for (int j = 0; j < 4; ++j) {
    int hit = -1;
    for (int c = 0; c < 4; ++c)
      if ((d.atoms.col(j) - cols.col(c)).norm() < 1e-12) hit = c;
    REQUIRE(hit >= 0);
    seen[hit] = true;
  }
  for (bool s : seen) CHECK(s);
}

TEST_CASE("init_dictionary replaces a drawn zero column with a unit direction") {
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(5, 2);
  auto d = init_dictionary(make_sub(cols), 2, 9);
  for (int j = 0; j < 2; ++j) CHECK(d.atoms.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("init_dictionary is deterministic per seed and normalizes atoms") {
  Rng rng(21);
  Eigen::MatrixXd cols = oracle::random_matrix(rng, 6, 10) * 3.0;
  auto a = init_dictionary(make_sub(cols), 4, 77);
  auto b = init_dictionary(make_sub(cols), 4, 77);
  CHECK((a.atoms - b.atoms).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 0; j < 4; ++j) CHECK(a.atoms.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("init_dictionary samples with replacement when k exceeds the columns") {
  Rng rng(4);
  Eigen::MatrixXd cols = oracle::random_matrix(rng, 5, 2);
  auto d = init_dictionary(make_sub(cols), 6, 5);
  CHECK(d.atom_count() == 6);
  d.check_norms();
}

TEST_CASE("update_coefficients treats columns independently and honors weights") {
  Rng rng(33);
  Dictionary d;
  d.atoms = oracle::random_matrix(rng, 5, 3);
  for (int j = 0; j < 3; ++j) d.atoms.col(j).normalize();
  Eigen::MatrixXd y = oracle::random_matrix(rng, 5, 4);

  // A zero-weight column arrives as a zero target with zero regularizer and
  // must code to exactly zero (FISTA cold-starts at zero).
  Eigen::MatrixXd y_weighted = y;
  y_weighted.col(2).setZero();
  Eigen::VectorXd lambda_w(4);
  lambda_w << 0.1, 0.1, 0.0, 0.1;
  Eigen::MatrixXd x = update_coefficients(d, y_weighted, lambda_w);
  CHECK(x.col(2).cwiseAbs().maxCoeff() == 0.0);

  // Unit weights reproduce plain per-column coding.
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 0.1);
  Eigen::MatrixXd x_flat = update_coefficients(d, y, flat);
  for (int j = 0; j < 4; ++j) {
    LassoProblem p{d.atoms, y.col(j), 0.1};
    Eigen::VectorXd single = fista_lasso(p);
    CHECK((x_flat.col(j) - single).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("update_coefficients matches the coordinate-descent oracle per column") {
  Rng rng(44);
  Dictionary d;
  d.atoms = oracle::random_matrix(rng, 8, 5);
  for (int j = 0; j < 5; ++j) d.atoms.col(j).normalize();
  Eigen::MatrixXd y = oracle::random_matrix(rng, 8, 6);
  Eigen::VectorXd lambda_w = Eigen::VectorXd::Constant(6, 0.05);
  Eigen::MatrixXd x = update_coefficients(d, y, lambda_w);
  for (int j = 0; j < 6; ++j) {
    Eigen::VectorXd ref = oracle::cd_lasso(d.atoms, y.col(j), 0.05);
    const double mine = oracle::lasso_value(d.atoms, y.col(j), x.col(j), 0.05);
    const double best = oracle::lasso_value(d.atoms, y.col(j), ref, 0.05);
    CHECK(mine <= best + 1e-6);
  }
}

TEST_CASE("update_dictionary single-atom closed form renormalizes the sample") {
  Dictionary d;
  d.atoms = Eigen::MatrixXd::Zero(3, 1);
  d.atoms << 1, 0, 0;
  Eigen::VectorXd y(3);
  y << 2, 2, 1;  // norm 3 > 1
  SurrogateStats stats;
  stats.E = y;
  stats.F = Eigen::MatrixXd::Constant(1, 1, 1.0);
  auto out = update_dictionary(d, stats);
  CHECK((out.atoms.col(0) - y / 3.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("update_dictionary leaves unused atoms untouched") {
  Rng rng(3);
  Dictionary d;
  d.atoms = oracle::random_matrix(rng, 4, 3);
  for (int j = 0; j < 3; ++j) d.atoms.col(j).normalize();
  SurrogateStats stats;
  stats.E = oracle::random_matrix(rng, 4, 3);
  stats.F = Eigen::MatrixXd::Zero(3, 3);
  stats.F(0, 0) = 2.0;  // only atom 0 carries coefficient mass
  Eigen::VectorXd before = d.atoms.col(1);
  auto out = update_dictionary(d, stats);
  CHECK((out.atoms.col(1) - before).cwiseAbs().maxCoeff() == 0.0);
  CHECK((out.atoms.col(2) - d.atoms.col(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("update_dictionary never increases the surrogate and matches the oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    Dictionary d;
    d.atoms = oracle::random_matrix(rng, 5, 3);
    for (int j = 0; j < 3; ++j) d.atoms.col(j).normalize();
    Eigen::MatrixXd x_hat = oracle::random_matrix(rng, 3, 7);
    Eigen::MatrixXd y_hat = oracle::random_matrix(rng, 5, 7);
    auto stats = make_surrogate(y_hat, x_hat);

    const double before = surrogate_value(d, stats);
    auto out = update_dictionary(d, stats);
    double after = surrogate_value(out, stats);
    CHECK(after <= before + 1e-10);
    out.check_norms();

    // Iterating the pass reaches a block-coordinate fixed point; there an
    // independent projected-gradient refinement of each atom must not find a
    // meaningfully better dictionary.
    for (int sweep = 0; sweep < 200; ++sweep) {
      out = update_dictionary(out, stats);
      const double next = surrogate_value(out, stats);
      CHECK(next <= after + 1e-10);
      if (std::abs(after - next) <= 1e-13 * std::max(std::abs(after), 1.0)) {
        after = next;
        break;
      }
      after = next;
    }
    Dictionary refined = out;
    for (int j = 0; j < refined.atom_count(); ++j)
      refined.atoms = oracle::pg_atom_min(refined.atoms, stats.E, stats.F, j);
    const double oracle_after = surrogate_value(refined, stats);
    CHECK(after <= oracle_after + 1e-6);
  }
}

TEST_CASE("surrogate identity holds against the Frobenius form") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Dictionary d;
    d.atoms = oracle::random_matrix(rng, 6, 4);
    Eigen::MatrixXd x_hat = oracle::random_matrix(rng, 4, 9);
    Eigen::MatrixXd y_hat = oracle::random_matrix(rng, 6, 9);
    auto stats = make_surrogate(y_hat, x_hat);
    const double lhs = surrogate_value(d, stats) + (y_hat.transpose() * y_hat).trace();
    const double rhs = (y_hat - d.atoms * x_hat).squaredNorm();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("odl_fit drives spanned data to zero objective within three iterations") {
  Rng rng(12);
  Dictionary d0;
  d0.atoms = oracle::random_matrix(rng, 6, 3);
  for (int j = 0; j < 3; ++j) d0.atoms.col(j).normalize();
  Eigen::MatrixXd codes = oracle::random_matrix(rng, 3, 8);
  Eigen::MatrixXd y = d0.atoms * codes;  // exactly representable
  OdlConfig cfg;
  cfg.lambda = 0.0;
  auto r = odl_fit(y, Eigen::VectorXd::Zero(8), d0, cfg);
  REQUIRE(!r.objective_trace.empty());
  const size_t probe = std::min<size_t>(2, r.objective_trace.size() - 1);
  CHECK(r.objective_trace[probe] <= 1e-10);
}

TEST_CASE("odl_fit objective trace is monotone non-increasing") {
  Rng rng(13);
  Dictionary d0;
  d0.atoms = oracle::random_matrix(rng, 8, 4);
  for (int j = 0; j < 4; ++j) d0.atoms.col(j).normalize();
  Eigen::MatrixXd y = oracle::random_matrix(rng, 8, 12);
  OdlConfig cfg;
  cfg.lambda = 0.1;
  auto r = odl_fit(y, Eigen::VectorXd::Constant(12, cfg.lambda), d0, cfg);
  REQUIRE(r.objective_trace.size() >= 2);
  for (size_t i = 1; i < r.objective_trace.size(); ++i)
    CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-10);
  // And the final dictionary still satisfies the atom-norm invariant.
  r.dictionary.check_norms();
}

TEST_CASE("odl_fit is deterministic") {
  Rng rng(14);
  Dictionary d0;
  d0.atoms = oracle::random_matrix(rng, 5, 3);
  for (int j = 0; j < 3; ++j) d0.atoms.col(j).normalize();
  Eigen::MatrixXd y = oracle::random_matrix(rng, 5, 9);
  Eigen::VectorXd lw = Eigen::VectorXd::Constant(9, 0.05);
  OdlConfig cfg;
  auto a = odl_fit(y, lw, d0, cfg);
  auto b = odl_fit(y, lw, d0, cfg);
  CHECK((a.dictionary.atoms - b.dictionary.atoms).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("check_norms rejects an oversized atom") {
  Dictionary d;
  d.atoms = Eigen::MatrixXd::Zero(3, 2);
  d.atoms(0, 0) = 1.0;
  d.atoms(1, 1) = 1.5;
  CHECK_THROWS_AS(d.check_norms(), InvalidConfig);
}
