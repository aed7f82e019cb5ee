// SPDX-License-Identifier: Apache-2.0
#include "metaseg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "metaseg/error.hpp"
#include "metaseg/kernels.hpp"
#include "metaseg/metrics.hpp"

namespace metaseg {
namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

std::span<const double> column(const Eigen::MatrixXd& x, Eigen::Index j) {
  return {x.col(j).data(), static_cast<std::size_t>(x.rows())};
}

double label_mean(const Eigen::VectorXd& y) {
  if (y.size() == 0) throw Error(ErrorKind::EmptyDataset, "no training rows");
  const double m = y.mean();
  if (m <= 0.0 || m >= 1.0) throw Error(ErrorKind::SingleClass, "labels contain a single class");
  return m;
}

constexpr int kInnerSweeps = 100000;
constexpr double kInnerTolerance = 1e-13;
constexpr double kArmijo = 1e-4;
constexpr int kLineSearchSteps = 50;
constexpr double kSeparableLoss = 1e-6;

// Logistic loss pieces over fixed data. Coefficient vectors hold the
// intercept at index 0 followed by the p weights.
class LogisticProblem {
 public:
  LogisticProblem(const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
      : x_(x), y_(y), n_(static_cast<std::size_t>(x.rows())), p_(x.cols()) {
    cols_.reserve(static_cast<std::size_t>(p_));
    for (Eigen::Index j = 0; j < p_; ++j) cols_.push_back(column(x_, j));
  }

  std::size_t rows() const { return n_; }

  // eta = b + X w, accumulated column by column.
  void linear_predictor(const Eigen::VectorXd& beta, std::vector<double>& eta) const {
    eta.assign(n_, beta(0));
    for (Eigen::Index j = 0; j < p_; ++j) {
      if (beta(j + 1) != 0.0) kernels::axpy(beta(j + 1), cols_[static_cast<std::size_t>(j)], eta);
    }
  }

  double mean_loss(const std::vector<double>& eta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += softplus(eta[i]) - y_[static_cast<Eigen::Index>(i)] * eta[i];
    return s / static_cast<double>(n_);
  }

  // Gradient and Hessian of the mean loss at eta.
  void quadratic(const std::vector<double>& eta, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
    resid_.resize(n_);
    curv_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double pr = sigmoid(eta[i]);
      resid_[i] = pr - y_[static_cast<Eigen::Index>(i)];
      curv_[i] = pr * (1.0 - pr);
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    g.resize(p_ + 1);
    h.resize(p_ + 1, p_ + 1);
    double gs = 0.0, hs = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      gs += resid_[i];
      hs += curv_[i];
    }
    g(0) = gs * inv_n;
    h(0, 0) = hs * inv_n;
    for (Eigen::Index j = 0; j < p_; ++j) {
      const auto& cj = cols_[static_cast<std::size_t>(j)];
      g(j + 1) = kernels::dot(cj, resid_) * inv_n;
      h(0, j + 1) = h(j + 1, 0) = kernels::dot(cj, curv_) * inv_n;
      for (Eigen::Index k = 0; k <= j; ++k) {
        h(j + 1, k + 1) = h(k + 1, j + 1) =
            kernels::weighted_dot(cj, cols_[static_cast<std::size_t>(k)], curv_) * inv_n;
      }
    }
  }

  // trial = eta + t * (d0 + X d_w)
  void shifted(const std::vector<double>& eta, const std::vector<double>& xd, double t,
               std::vector<double>& trial) const {
    trial = eta;
    kernels::axpy(t, xd, trial);
  }

  const std::span<const double>& col(Eigen::Index j) const { return cols_[static_cast<std::size_t>(j)]; }

 private:
  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  std::size_t n_;
  Eigen::Index p_;
  std::vector<std::span<const double>> cols_;
  std::vector<double> resid_, curv_;
};

double l1_weights(const Eigen::VectorXd& beta) { return beta.tail(beta.size() - 1).lpNorm<1>(); }

// Cyclic coordinate descent with soft-thresholding on
//   g.d + d'Hd/2 + lambda |w + d_w|_1,
// the intercept coordinate (index 0) unpenalized.
Eigen::VectorXd newton_direction(const Eigen::VectorXd& beta, const Eigen::VectorXd& g,
                                 const Eigen::MatrixXd& h, double lambda) {
  const Eigen::Index m = beta.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd hd = Eigen::VectorXd::Zero(m);
  for (int sweep = 0; sweep < kInnerSweeps; ++sweep) {
    double max_step = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double hjj = h(j, j);
      if (!(hjj > 0.0)) continue;
      const double cur = beta(j) + d(j);
      const double grad = g(j) + hd(j);
      const double target = j == 0 ? cur - grad / hjj : soft_threshold(hjj * cur - grad, lambda) / hjj;
      const double step = target - cur;
      if (step == 0.0) continue;
      d(j) += step;
      for (Eigen::Index k = 0; k < m; ++k) hd(k) += step * h(k, j);
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < kInnerTolerance) break;
  }
  return d;
}

}  // namespace

Standardizer Standardizer::identity(Eigen::Index p) {
  return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Ones(p)};
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != means.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "standardizer expects " + std::to_string(means.size()) + " columns, got " +
                    std::to_string(x.cols()));
  }
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (stds(j) == 0.0) {
      out.col(j).setZero();
    } else {
      out.col(j) = (x.col(j).array() - means(j)) / stds(j);
    }
  }
  return out;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& x_train) {
  const Eigen::Index n = x_train.rows();
  if (n < 2) throw Error(ErrorKind::EmptyDataset, "standardizer needs at least two rows");
  Standardizer s{Eigen::VectorXd(x_train.cols()), Eigen::VectorXd(x_train.cols())};
  for (Eigen::Index j = 0; j < x_train.cols(); ++j) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += x_train(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (x_train(i, j) - mean) * (x_train(i, j) - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) sd = 0.0;
    s.means(j) = mean;
    s.stds(j) = sd;
  }
  return s;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LogisticL1: return "logistic_l1";
    case ModelKind::LogisticPlain: return "logistic";
    case ModelKind::Linear: return "linear";
  }
  return "unknown";
}

std::vector<Eigen::Index> MetaModel::active_set() const {
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (weights(j) != 0.0) active.push_back(j);
  }
  return active;
}

double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& w, double b, double lambda) {
  const Eigen::VectorXd eta = (x * w).array() + b;
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) s += softplus(eta(i)) - y(i) * eta(i);
  return s / static_cast<double>(x.rows()) + lambda * w.lpNorm<1>();
}

Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& w, double b) {
  const Eigen::VectorXd eta = (x * w).array() + b;
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = sigmoid(eta(i)) - y(i);
  return x.transpose() * r / static_cast<double>(x.rows());
}

MetaModel null_logistic_model(Eigen::Index p, const Eigen::VectorXd& y) {
  const double ybar = label_mean(y);
  MetaModel m;
  m.kind = ModelKind::LogisticPlain;
  m.weights = Eigen::VectorXd::Zero(p);
  m.intercept = std::log(ybar / (1.0 - ybar));
  m.standardizer = Standardizer::identity(p);
  return m;
}

double lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const MetaModel null_model = null_logistic_model(x.cols(), y);
  const double p0 = sigmoid(null_model.intercept);
  std::vector<double> resid(static_cast<std::size_t>(x.rows()));
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = p0 - y(static_cast<Eigen::Index>(i));
  double best = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    best = std::max(best, std::abs(kernels::dot(column(x, j), resid)) / static_cast<double>(x.rows()));
  }
  return best;
}

MetaModel fit_lasso_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                             const MetaModel* warm_start, const SolverOptions& options,
                             SolverTrace* trace) {
  if (x.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "X and y differ in rows");
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  const Eigen::Index p = x.cols();

  MetaModel model = null_logistic_model(p, y);
  model.kind = lambda > 0.0 ? ModelKind::LogisticL1 : ModelKind::LogisticPlain;
  model.lambda = lambda;
  if (trace) *trace = {};

  // At or beyond lambda_max the null model satisfies KKT exactly.
  if (lambda > 0.0 && lambda >= lambda_max(x, y)) {
    if (trace) trace->objective.push_back(logistic_objective(x, y, model.weights, model.intercept, lambda));
    return model;
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  beta(0) = model.intercept;
  if (warm_start && warm_start->weights.size() == p) {
    beta(0) = warm_start->intercept;
    beta.tail(p) = warm_start->weights;
  }

  LogisticProblem problem(x, y);
  std::vector<double> eta, xd, trial;
  problem.linear_predictor(beta, eta);
  double objective = problem.mean_loss(eta) + lambda * l1_weights(beta);
  if (trace) trace->objective.push_back(objective);

  const auto finish = [&] {
    // A misclassified point costs at least log(2) / n, so a vanishing loss
    // means every point is separated and the minimizer is at infinity.
    if (lambda == 0.0 && p > 0 && objective < kSeparableLoss) {
      throw Error(ErrorKind::SeparableDivergence,
                  "training loss vanishes at lambda = 0; data are separable");
    }
    model.intercept = beta(0);
    model.weights = beta.tail(p);
    return model;
  };

  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    problem.quadratic(eta, g, h);
    const Eigen::VectorXd d = newton_direction(beta, g, h, lambda);
    const double decrease =
        g.dot(d) + lambda * (l1_weights(beta + d) - l1_weights(beta));
    if (!(decrease < 0.0)) return finish();

    xd.assign(problem.rows(), d(0));
    for (Eigen::Index j = 0; j < p; ++j) {
      if (d(j + 1) != 0.0) kernels::axpy(d(j + 1), problem.col(j), xd);
    }
    // Backtracking keeps the objective non-increasing.
    double t = 1.0;
    double next = objective;
    bool accepted = false;
    for (int k = 0; k < kLineSearchSteps; ++k, t *= 0.5) {
      problem.shifted(eta, xd, t, trial);
      const double f = problem.mean_loss(trial) + lambda * l1_weights(beta + t * d);
      if (f <= objective + kArmijo * t * decrease) {
        next = f;
        accepted = true;
        break;
      }
    }
    if (!accepted) return finish();

    beta += t * d;
    eta.swap(trial);
    const double max_change = t * d.lpNorm<Eigen::Infinity>();
    if (lambda == 0.0 && p > 0 && beta.tail(p).lpNorm<Eigen::Infinity>() > options.divergence_bound) {
      throw Error(ErrorKind::SeparableDivergence,
                  "weights exceed " + std::to_string(options.divergence_bound) +
                      " at lambda = 0; data are (quasi-)separable");
    }
    if (trace) {
      trace->sweeps = sweep;
      trace->objective.push_back(next);
    }
    const bool converged = max_change < options.update_tolerance ||
                           objective - next < options.objective_tolerance;
    objective = next;
    if (converged) return finish();
  }
  throw Error(ErrorKind::NonConvergence,
              "solver did not converge in " + std::to_string(options.max_sweeps) +
                  " iterations (lambda = " + std::to_string(lambda) + ")");
}

MetaModel refit_unpenalized(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const std::vector<Eigen::Index>& active_set,
                            const SolverOptions& options) {
  const Eigen::Index p = x.cols();
  if (active_set.empty()) return null_logistic_model(p, y);

  Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(active_set.size()));
  for (std::size_t k = 0; k < active_set.size(); ++k) {
    sub.col(static_cast<Eigen::Index>(k)) = x.col(active_set[k]);
  }
  const MetaModel fit = fit_lasso_logistic(sub, y, 0.0, nullptr, options);

  MetaModel out = null_logistic_model(p, y);
  out.intercept = fit.intercept;
  for (std::size_t k = 0; k < active_set.size(); ++k) {
    out.weights(active_set[k]) = fit.weights(static_cast<Eigen::Index>(k));
  }
  return out;
}

std::vector<double> default_lambda_grid(double lambda_max, int count, double ratio,
                                        bool append_zero) {
  std::vector<double> grid;
  if (lambda_max > 0.0 && count > 0) {
    grid.push_back(lambda_max);
    const double log_hi = std::log(lambda_max);
    const double log_lo = std::log(lambda_max * ratio);
    for (int k = 1; k < count; ++k) {
      grid.push_back(std::exp(log_hi + (log_lo - log_hi) * k / (count - 1)));
    }
  }
  if (append_zero) grid.push_back(0.0);
  return grid;
}

LassoPath lasso_path(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                     const Eigen::MatrixXd& x_val, const Eigen::VectorXd& y_val,
                     const std::vector<double>& grid, const PathOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty lambda grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] < grid[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "lambda grid must be strictly decreasing");
    }
  }
  const bool has_val = x_val.rows() > 0;
  const auto score = [](const MetaModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        double& acc, double& auc) {
    const Eigen::VectorXd s = predict(m, x);
    acc = accuracy(as_span(s), as_span(y));
    auc = auroc(as_span(s), as_span(y));
  };

  LassoPath path;
  const MetaModel* warm = nullptr;
  std::vector<Eigen::Index> last_active;
  bool have_refit = false;
  for (double lambda : grid) {
    PathPoint pt;
    pt.lambda = lambda;
    try {
      pt.model = fit_lasso_logistic(x_train, y_train, lambda, warm, options.solver);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SeparableDivergence || path.points.empty()) throw;
      path.truncated = true;
      break;
    }
    score(pt.model, x_train, y_train, pt.train_acc, pt.train_auroc);
    if (has_val) score(pt.model, x_val, y_val, pt.val_acc, pt.val_auroc);

    if (options.with_refit) {
      const auto active = pt.model.active_set();
      if (have_refit && active == last_active) {
        pt.refit = path.points.back().refit;
        pt.refit_separable = path.points.back().refit_separable;
      } else {
        try {
          pt.refit = refit_unpenalized(x_train, y_train, active, options.solver);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::SeparableDivergence) throw;
          pt.refit = pt.model;
          pt.refit_separable = true;
        }
      }
      last_active = active;
      have_refit = true;
      score(pt.refit, x_train, y_train, pt.refit_train_acc, pt.refit_train_auroc);
      if (has_val) score(pt.refit, x_val, y_val, pt.refit_val_acc, pt.refit_val_auroc);
    }
    path.points.push_back(std::move(pt));
    warm = &path.points.back().model;
  }

  double best = -1.0;
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const double acc = has_val ? path.points[k].val_acc : path.points[k].train_acc;
    if (acc > best) {
      best = acc;
      path.best_index = k;
    }
  }
  return path;
}

MetaModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "X and y differ in rows");
  if (x.rows() == 0) throw Error(ErrorKind::EmptyDataset, "no rows for linear regression");
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd a(x.rows(), p + 1);
  a.col(0).setOnes();
  a.rightCols(p) = x;

  Eigen::MatrixXd normal = a.transpose() * a;
  normal.diagonal().array() += kLinearRidgeJitter;
  const Eigen::VectorXd rhs = a.transpose() * y;
  const Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "normal equations are not positive definite");
  }
  const Eigen::VectorXd sol = llt.solve(rhs);
  if (!sol.allFinite()) throw Error(ErrorKind::SingularSystem, "non-finite least-squares solution");

  MetaModel m;
  m.kind = ModelKind::Linear;
  m.intercept = sol(0);
  m.weights = sol.tail(p);
  m.standardizer = Standardizer::identity(p);
  return m;
}

Eigen::VectorXd predict(const MetaModel& model, const Eigen::MatrixXd& x_raw) {
  if (x_raw.cols() != model.weights.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "model expects " + std::to_string(model.weights.size()) + " features, got " +
                    std::to_string(x_raw.cols()));
  }
  const Eigen::MatrixXd xs = model.standardizer.size() == model.weights.size()
                                 ? model.standardizer.apply(x_raw)
                                 : x_raw;
  Eigen::VectorXd eta = (xs * model.weights).array() + model.intercept;
  if (model.is_logistic()) {
    // Keep scores strictly inside (0,1) even where the logistic saturates.
    const double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta(i) = std::clamp(sigmoid(eta(i)), lo, hi);
  }
  return eta;
}

Eigen::VectorXd predict_clamped(const MetaModel& model, const Eigen::MatrixXd& x_raw) {
  return predict(model, x_raw).cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace metaseg
