// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace metaseg {

/// Column-wise affine map to zero mean and unit sample (n-1) standard
/// deviation. Columns whose spread is numerically zero map to 0.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;

  static Standardizer identity(Eigen::Index p);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::Index size() const noexcept { return means.size(); }
};

/// Throws EmptyDataset when fewer than two rows are given.
Standardizer fit_standardizer(const Eigen::MatrixXd& x_train);

enum class ModelKind { LogisticL1, LogisticPlain, Linear };

std::string_view to_string(ModelKind kind);

struct MetaModel {
  ModelKind kind = ModelKind::LogisticPlain;
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double lambda = 0.0;
  /// Applied to raw features by predict(); the fit routines themselves
  /// expect already-standardized input and leave this as the identity.
  Standardizer standardizer;

  std::vector<Eigen::Index> active_set() const;
  bool is_logistic() const noexcept { return kind != ModelKind::Linear; }
};

struct SolverOptions {
  /// Stop once the largest coefficient change of an iteration drops below
  /// this, or once an iteration lowers the objective by less than
  /// objective_tolerance.
  double update_tolerance = 1e-8;
  double objective_tolerance = 1e-10;
  int max_sweeps = 10000;
  /// At lambda = 0, weights beyond this signal (quasi-)separable data.
  double divergence_bound = 1e4;
};

struct SolverTrace {
  int sweeps = 0;
  /// Objective after initialization and after every outer iteration.
  std::vector<double> objective;
};

/// (1/n) sum_i logloss(y_i, b + w.x_i) + lambda * |w|_1; intercept unpenalized.
double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& w, double b, double lambda);

/// Gradient of the mean log-loss with respect to w (not including the penalty).
Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& w, double b);

/// Smallest lambda whose solution has all weights zero.
double lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Intercept-only logistic model, b = logit(mean(y)).
MetaModel null_logistic_model(Eigen::Index p, const Eigen::VectorXd& y);

/// L1-penalized logistic regression. Each outer iteration minimizes the
/// local quadratic model plus penalty by cyclic coordinate descent with
/// soft-thresholding, then backtracks along that direction until the true
/// objective decreases sufficiently, so the objective never increases.
/// Throws NonConvergence, SeparableDivergence, SingleClass.
MetaModel fit_lasso_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                             const MetaModel* warm_start = nullptr,
                             const SolverOptions& options = {}, SolverTrace* trace = nullptr);

/// Plain (lambda = 0) logistic regression on the given columns only; other
/// weights stay zero. An empty active set yields the null model.
MetaModel refit_unpenalized(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const std::vector<Eigen::Index>& active_set,
                            const SolverOptions& options = {});

/// `count` log-spaced values from lambda_max down to lambda_max * ratio,
/// optionally followed by an exact 0.
std::vector<double> default_lambda_grid(double lambda_max, int count = 50, double ratio = 1e-4,
                                        bool append_zero = true);

struct PathPoint {
  double lambda = 0.0;
  MetaModel model;
  double train_acc = 0.0;
  double train_auroc = 0.0;
  double val_acc = 0.0;
  double val_auroc = 0.0;
  /// Unpenalized refit on this point's active set.
  MetaModel refit;
  double refit_train_acc = 0.0;
  double refit_train_auroc = 0.0;
  double refit_val_acc = 0.0;
  double refit_val_auroc = 0.0;
  /// The unpenalized refit diverged; `refit` then repeats the penalized model.
  bool refit_separable = false;
};

struct LassoPath {
  std::vector<PathPoint> points;
  /// Point with the best validation accuracy (first on ties).
  std::size_t best_index = 0;
  /// The path stopped early because a small-lambda fit diverged on
  /// separable data.
  bool truncated = false;
};

struct PathOptions {
  bool with_refit = true;
  SolverOptions solver;
};

/// Warm-started fits along a strictly decreasing grid. Validation metrics are
/// recorded when `x_val` has rows; otherwise the best point is picked on
/// training accuracy. A SeparableDivergence after the first point ends the
/// path instead of propagating.
LassoPath lasso_path(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                     const Eigen::MatrixXd& x_val, const Eigen::VectorXd& y_val,
                     const std::vector<double>& grid, const PathOptions& options = {});

inline constexpr double kLinearRidgeJitter = 1e-10;

/// Least squares with intercept via normal equations (ridge jitter on the
/// diagonal). Throws SingularSystem.
MetaModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Scores for raw features: probabilities for logistic kinds, raw linear
/// predictions for Linear. Throws DimensionMismatch.
Eigen::VectorXd predict(const MetaModel& model, const Eigen::MatrixXd& x_raw);

/// Linear predictions clamped to [0,1] for reporting IoU estimates.
Eigen::VectorXd predict_clamped(const MetaModel& model, const Eigen::MatrixXd& x_raw);

}  // namespace metaseg
