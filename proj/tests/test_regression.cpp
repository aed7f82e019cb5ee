// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "metaseg/error.hpp"
#include "metaseg/regression.hpp"
#include "support/oracles.hpp"

using namespace metaseg;

namespace {

/// Largest violation of the L1 optimality conditions at (w, b).
double kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MetaModel& m) {
  const Eigen::VectorXd g = logistic_gradient(x, y, m.weights, m.intercept);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double v = m.weights(j) != 0.0 ? std::abs(g(j) + m.lambda * (m.weights(j) > 0 ? 1.0 : -1.0))
                                         : std::max(0.0, std::abs(g(j)) - m.lambda);
    worst = std::max(worst, v);
  }
  // Intercept stationarity.
  const Eigen::VectorXd eta = (x * m.weights).array() + m.intercept;
  double gb = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) gb += 1.0 / (1.0 + std::exp(-eta(i))) - y(i);
  return std::max(worst, std::abs(gb) / static_cast<double>(x.rows()));
}

Eigen::MatrixXd standardized(const Eigen::MatrixXd& x) { return fit_standardizer(x).apply(x); }

}  // namespace

TEST_CASE("standardizer") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 5, 3, 5;
  const Standardizer s = fit_standardizer(x);
  const Eigen::MatrixXd z = s.apply(x);
  CHECK(z(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(z(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(z(0, 1) == 0.0);
  CHECK(z(1, 1) == 0.0);
  CHECK(s.stds(1) == 0.0);

  Rng rng(51);
  Eigen::MatrixXd r(40, 6);
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = 1000.0 * j + rng.normal() * (j + 1);
  const Eigen::MatrixXd rz = standardized(r);
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    CHECK(std::abs(rz.col(j).mean()) < 1e-10);
    const double var = (rz.col(j).array() - rz.col(j).mean()).square().sum() / (r.rows() - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fit_standardizer(Eigen::MatrixXd(1, 3)), Error);
  CHECK_THROWS_AS(s.apply(Eigen::MatrixXd(2, 3)), Error);
}

TEST_CASE("lambda at or above lambda_max gives the exact null model") {
  Rng rng(52);
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  oracle::logistic_problem(rng, 80, 5, x, y);
  x = standardized(x);
  const double lmax = lambda_max(x, y);
  CHECK(lmax > 0.0);
  for (double f : {1.0, 1.5, 10.0}) {
    const MetaModel m = fit_lasso_logistic(x, y, f * lmax);
    CHECK(m.weights.isZero(0.0));
    CHECK(m.intercept == null_logistic_model(5, y).intercept);
  }
  const MetaModel below = fit_lasso_logistic(x, y, 0.9 * lmax);
  CHECK(below.active_set().size() >= 1);
}

TEST_CASE("symmetric data gives a zero model") {
  Eigen::MatrixXd x(4, 1);
  x << -1, 1, -1, 1;
  Eigen::VectorXd y(4);
  y << 0, 0, 1, 1;
  const MetaModel m = fit_lasso_logistic(x, y, 0.0);
  CHECK(std::abs(m.weights(0)) < 1e-12);
  CHECK(std::abs(m.intercept) < 1e-12);
  CHECK(lambda_max(x, y) == 0.0);
}

TEST_CASE("penalized fit agrees with proximal gradient") {
  Rng rng(53);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    oracle::logistic_problem(rng, 50, 4, x, y);
    const double lambda = 0.01;
    const MetaModel m = fit_lasso_logistic(x, y, lambda);
    const oracle::Fit ref = oracle::proximal_gradient(x, y, lambda);
    CHECK((m.weights - ref.w).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(std::abs(m.intercept - ref.b) < 1e-6);
    CHECK(logistic_objective(x, y, m.weights, m.intercept, lambda) <=
          oracle::objective(x, y, ref.w, ref.b, lambda) + 1e-12);
  }
}

TEST_CASE("unpenalized endpoint agrees with IRLS") {
  Rng rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    oracle::logistic_problem(rng, 200, 6, x, y, 0.7);
    const MetaModel m = fit_lasso_logistic(x, y, 0.0);
    const oracle::Fit ref = oracle::irls(x, y);
    CHECK((m.weights - ref.w).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(std::abs(m.intercept - ref.b) < 1e-6);
  }
}

TEST_CASE("path fits satisfy optimality conditions and the trace never rises") {
  Rng rng(55);
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    oracle::logistic_problem(rng, 150, 10, x, y);
    x = standardized(x);
    const auto grid = default_lambda_grid(lambda_max(x, y), 12, 1e-3);
    const LassoPath path = lasso_path(x, y, Eigen::MatrixXd(), Eigen::VectorXd(), grid);
    REQUIRE(path.points.size() == grid.size());
    for (const PathPoint& p : path.points) {
      CHECK(kkt_violation(x, y, p.model) < 1e-6);
      CHECK(p.model.lambda == p.lambda);
    }
    CHECK(path.points.front().model.active_set().empty());

    SolverTrace trace;
    fit_lasso_logistic(x, y, grid[6], nullptr, {}, &trace);
    REQUIRE(trace.objective.size() >= 2);
    for (std::size_t k = 1; k < trace.objective.size(); ++k)
      CHECK(trace.objective[k] <= trace.objective[k - 1]);
  }
}

TEST_CASE("collinear features still converge") {
  Rng rng(56);
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  oracle::logistic_problem(rng, 300, 4, x, y);
  Eigen::MatrixXd xc(300, 6);
  xc.leftCols(4) = x;
  xc.col(4) = x.col(0) + x.col(1);
  xc.col(5) = -x.col(2);
  xc = standardized(xc);
  const auto grid = default_lambda_grid(lambda_max(xc, y), 20, 1e-4);
  const LassoPath path = lasso_path(xc, y, Eigen::MatrixXd(), Eigen::VectorXd(), grid);
  CHECK(path.points.size() == grid.size());
  for (const PathPoint& p : path.points)
    if (p.lambda > 0.0) CHECK(kkt_violation(xc, y, p.model) < 1e-6);
}

TEST_CASE("the informative feature enters first") {
  Rng rng(57);
  const Eigen::Index n = 200;
  Eigen::MatrixXd x(n, 5);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) x(i, j) = rng.normal();
    y(i) = rng.uniform() < 1.0 / (1.0 + std::exp(-3.0 * x(i, 1))) ? 1.0 : 0.0;
  }
  x = standardized(x);
  const auto grid = default_lambda_grid(lambda_max(x, y), 30, 1e-3, false);
  const LassoPath path = lasso_path(x, y, Eigen::MatrixXd(), Eigen::VectorXd(), grid);
  for (const PathPoint& p : path.points) {
    const auto active = p.model.active_set();
    if (active.empty()) continue;
    CHECK(active == std::vector<Eigen::Index>{1});
    break;
  }
}

TEST_CASE("path is deterministic and the grid is well formed") {
  const auto grid = default_lambda_grid(2.0, 5, 1e-4);
  REQUIRE(grid.size() == 6);
  CHECK(grid.front() == 2.0);
  CHECK(grid[4] == doctest::Approx(2e-4).epsilon(1e-12));
  CHECK(grid.back() == 0.0);
  CHECK(default_lambda_grid(2.0, 5, 1e-4, false).size() == 5);

  Rng rng(58);
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  oracle::logistic_problem(rng, 120, 6, x, y);
  x = standardized(x);
  const auto g = default_lambda_grid(lambda_max(x, y), 10, 1e-3);
  const LassoPath a = lasso_path(x.topRows(60), y.head(60), x.bottomRows(60), y.tail(60), g);
  const LassoPath b = lasso_path(x.topRows(60), y.head(60), x.bottomRows(60), y.tail(60), g);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(a.best_index == b.best_index);
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    CHECK(a.points[k].model.weights == b.points[k].model.weights);
    CHECK(a.points[k].model.intercept == b.points[k].model.intercept);
    CHECK(a.points[k].val_acc == b.points[k].val_acc);
  }
  double best = 0.0;
  for (const auto& p : a.points) best = std::max(best, p.val_acc);
  CHECK(a.points[a.best_index].val_acc == best);

  CHECK_THROWS_AS(lasso_path(x, y, x, y, {0.1, 0.2}), Error);
}

TEST_CASE("unpenalized refit") {
  Rng rng(59);
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  oracle::logistic_problem(rng, 150, 5, x, y);
  x = standardized(x);
  const MetaModel null_model = refit_unpenalized(x, y, {});
  CHECK(null_model.weights.isZero(0.0));
  CHECK(null_model.intercept == doctest::Approx(std::log(y.mean() / (1.0 - y.mean()))));

  const double lambda = 0.3 * lambda_max(x, y);
  const MetaModel pen = fit_lasso_logistic(x, y, lambda);
  const auto active = pen.active_set();
  REQUIRE_FALSE(active.empty());
  const MetaModel refit = refit_unpenalized(x, y, active);
  for (Eigen::Index j = 0; j < 5; ++j)
    if (std::find(active.begin(), active.end(), j) == active.end()) CHECK(refit.weights(j) == 0.0);
  // The refit minimizes the unpenalized loss over a set containing the penalized solution.
  CHECK(logistic_objective(x, y, refit.weights, refit.intercept, 0.0) <=
        logistic_objective(x, y, pen.weights, pen.intercept, 0.0) + 1e-12);
}

TEST_CASE("separable data is reported, not silently fitted") {
  Eigen::MatrixXd x(6, 1);
  x << -3, -2, -1, 1, 2, 3;
  Eigen::VectorXd y(6);
  y << 0, 0, 0, 1, 1, 1;
  try {
    fit_lasso_logistic(x, y, 0.0);
    FAIL("expected SeparableDivergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SeparableDivergence);
    CHECK(is_numerical(e.kind()));
  }
  const auto grid = default_lambda_grid(lambda_max(x, y), 5, 1e-3);
  const LassoPath path = lasso_path(x, y, x, y, grid);
  CHECK(path.truncated);
  CHECK(path.points.size() == 5);

  Eigen::VectorXd single = Eigen::VectorXd::Ones(6);
  try {
    fit_lasso_logistic(x, single, 0.1);
    FAIL("expected SingleClass");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingleClass);
  }
}

TEST_CASE("linear least squares") {
  SUBCASE("exact line") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 2, 3;
    Eigen::VectorXd y(4);
    y << 1, 3, 5, 7;
    const MetaModel m = fit_linear(x, y);
    CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.weights(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m.kind == ModelKind::Linear);
  }
  SUBCASE("residuals are orthogonal to the design") {
    Rng rng(60);
    Eigen::MatrixXd x(100, 7);
    Eigen::VectorXd y(100);
    for (Eigen::Index i = 0; i < 100; ++i) {
      for (Eigen::Index j = 0; j < 7; ++j) x(i, j) = rng.normal();
      y(i) = x.row(i).sum() * 0.2 + rng.normal();
    }
    x = standardized(x);
    const MetaModel m = fit_linear(x, y);
    const Eigen::VectorXd r = y - predict(m, x);
    CHECK(std::abs(r.sum()) < 1e-8);
    CHECK((x.transpose() * r).lpNorm<Eigen::Infinity>() < 1e-8);
    const Eigen::VectorXd c = predict_clamped(m, x);
    CHECK(c.minCoeff() >= 0.0);
    CHECK(c.maxCoeff() <= 1.0);
  }
}

TEST_CASE("predictions") {
  Rng rng(61);
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  oracle::logistic_problem(rng, 120, 4, x, y, 3.0);
  const Standardizer s = fit_standardizer(x);
  MetaModel m = fit_lasso_logistic(s.apply(x), y, 1e-3);
  m.standardizer = s;
  const Eigen::VectorXd p = predict(m, x);
  CHECK(p.minCoeff() > 0.0);
  CHECK(p.maxCoeff() < 1.0);

  // Affine rescaling of the raw features leaves standardized predictions unchanged.
  Eigen::MatrixXd x2 = x;
  for (Eigen::Index j = 0; j < x2.cols(); ++j) x2.col(j) = x2.col(j) * (10.0 * (j + 1)) + Eigen::VectorXd::Constant(x2.rows(), 5.0 * j);
  const Standardizer s2 = fit_standardizer(x2);
  MetaModel m2 = fit_lasso_logistic(s2.apply(x2), y, 1e-3);
  m2.standardizer = s2;
  CHECK((predict(m2, x2) - p).lpNorm<Eigen::Infinity>() < 1e-6);

  MetaModel extreme = m;
  extreme.intercept = 1e6;
  const Eigen::VectorXd hi = predict(extreme, x);
  CHECK(hi.maxCoeff() < 1.0);
  CHECK_THROWS_AS(predict(m, Eigen::MatrixXd(3, 2)), Error);
}
