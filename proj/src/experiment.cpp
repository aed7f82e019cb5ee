// SPDX-License-Identifier: Apache-2.0
#include "metaseg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metaseg/error.hpp"
#include "metaseg/metrics.hpp"
#include "metaseg/rng.hpp"

namespace metaseg {
namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(idx[k]));
  }
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) = v(static_cast<Eigen::Index>(idx[k]));
  }
  return out;
}

void score_classifier(const MetaModel& m, const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
                      const Eigen::MatrixXd& xv, const Eigen::VectorXd& yv, ClassScores& out) {
  const Eigen::VectorXd st = predict(m, xt);
  const Eigen::VectorXd sv = predict(m, xv);
  out.train_acc = accuracy(as_span(st), as_span(yt));
  out.train_auroc = auroc(as_span(st), as_span(yt));
  out.val_acc = accuracy(as_span(sv), as_span(yv));
  out.val_auroc = auroc(as_span(sv), as_span(yv));
}

void score_regressor(const MetaModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     double& sigma, double& r2) {
  const Eigen::VectorXd p = predict(m, x);
  sigma = residual_sigma(as_span(p), as_span(y));
  r2 = r_squared(as_span(p), as_span(y));
}

std::size_t count_class(const Eigen::VectorXd& y, double label) {
  return static_cast<std::size_t>((y.array() == label).count());
}

}  // namespace

Split make_split(const std::vector<SegmentRecord>& records, const SplitPlan& plan, int run) {
  if (records.size() < 2) throw Error(ErrorKind::EmptyDataset, "need at least two records to split");
  if (!(plan.fraction > 0.0 && plan.fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "split fraction must lie in (0,1)");
  }
  Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(run)));
  Split split;

  if (!plan.image_level) {
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    auto n_train = static_cast<std::size_t>(std::lround(plan.fraction * static_cast<double>(order.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, order.size() - 1);
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  } else {
    std::vector<std::int64_t> images;
    for (const auto& r : records) images.push_back(r.image_id);
    std::sort(images.begin(), images.end());
    images.erase(std::unique(images.begin(), images.end()), images.end());
    if (images.size() < 2) throw Error(ErrorKind::EmptyDataset, "image-level split needs two images");
    rng.shuffle(images);
    auto n_train = static_cast<std::size_t>(std::lround(plan.fraction * static_cast<double>(images.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, images.size() - 1);
    std::vector<std::int64_t> train_images(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(train_images.begin(), train_images.end());
    for (std::size_t i = 0; i < records.size(); ++i) {
      const bool in_train = std::binary_search(train_images.begin(), train_images.end(), records[i].image_id);
      (in_train ? split.train : split.val).push_back(i);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  const double n = static_cast<double>(values.size());
  for (double v : values) a.mean += v;
  a.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return a;
}

ExperimentReport run_experiment(const std::vector<SegmentRecord>& records,
                                const ExperimentConfig& config) {
  if (config.plan.n_runs < 1) throw Error(ErrorKind::InvalidArgument, "need at least one run");
  const Dataset base = build_dataset(records, RegressionTarget::IoUAdj);

  ExperimentReport report;
  report.columns = base.column_names;
  report.i1 = count_class(base.y_cls, 1.0);
  report.i0 = count_class(base.y_cls, 0.0);
  if (report.i0 < 2 || report.i1 < 2) {
    throw Error(ErrorKind::SingleClass, "need at least two segments of each meta-class (I0 = " +
                                            std::to_string(report.i0) + ", I1 = " +
                                            std::to_string(report.i1) + ")");
  }

  for (Eigen::Index j = 0; j < base.features.cols(); ++j) {
    const Eigen::VectorXd col = base.features.col(j);
    double rho = std::numeric_limits<double>::quiet_NaN();
    try {
      rho = pearson(as_span(col), as_span(base.y_reg));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroVariance) throw;
    }
    report.correlations.push_back(rho);
  }

  std::vector<Eigen::VectorXd> targets;
  for (RegressionTarget t : config.targets) {
    targets.push_back(t == RegressionTarget::IoUAdj ? base.y_reg : build_dataset(records, t).y_reg);
  }

  const auto entropy_col = static_cast<Eigen::Index>(kEntropyMeanColumn);
  for (int run = 0; run < config.plan.n_runs; ++run) {
    const Split split = make_split(records, config.plan, run);
    RunResult res;
    res.run = run;
    res.n_train = split.train.size();
    res.n_val = split.val.size();

    const Eigen::MatrixXd x_train = take_rows(base.features, split.train);
    const Eigen::MatrixXd x_val = take_rows(base.features, split.val);
    const Eigen::VectorXd y_train = take(base.y_cls, split.train);
    const Eigen::VectorXd y_val = take(base.y_cls, split.val);
    for (const Eigen::VectorXd* y : {&y_train, &y_val}) {
      if (count_class(*y, 0.0) == 0 || count_class(*y, 1.0) == 0) {
        throw Error(ErrorKind::SingleClass,
                    "run " + std::to_string(run) + " has a split with a single meta-class");
      }
    }

    const Standardizer std_all = fit_standardizer(x_train);
    const Eigen::MatrixXd zt = std_all.apply(x_train);
    const Eigen::MatrixXd zv = std_all.apply(x_val);

    const auto grid = default_lambda_grid(lambda_max(zt, y_train), config.grid_count, config.grid_ratio);
    PathOptions popt;
    popt.solver = config.solver;
    res.path = lasso_path(zt, y_train, zv, y_val, grid, popt);
    const PathPoint& best = res.path.points[res.path.best_index];
    res.lambda = best.lambda;
    res.active_features = best.model.active_set().size();

    res.classifier = best.model;
    res.classifier.standardizer = std_all;
    MetaModel refit = best.refit;
    refit.standardizer = std_all;
    score_classifier(res.classifier, x_train, y_train, x_val, y_val, res.penalized);
    score_classifier(refit, x_train, y_train, x_val, y_val, res.unpenalized);

    const Eigen::MatrixXd et = x_train.col(entropy_col);
    const Eigen::MatrixXd ev = x_val.col(entropy_col);
    const Standardizer std_e = fit_standardizer(et);
    const Eigen::MatrixXd zet = std_e.apply(et);
    MetaModel entropy_model;
    try {
      entropy_model = fit_lasso_logistic(zet, y_train, 0.0, nullptr, config.solver);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SeparableDivergence) throw;
      // Separable on entropy alone: use the smallest penalty of the grid.
      const double lambda = lambda_max(zet, y_train) * config.grid_ratio;
      entropy_model = fit_lasso_logistic(zet, y_train, lambda, nullptr, config.solver);
    }
    entropy_model.standardizer = std_e;
    score_classifier(entropy_model, et, y_train, ev, y_val, res.entropy_only);

    res.naive.train_acc = naive_baseline(as_span(y_train));
    res.naive.val_acc = naive_baseline(as_span(y_val));
    res.naive.train_auroc = kNaiveAuroc;
    res.naive.val_auroc = kNaiveAuroc;

    const Eigen::VectorXd val_scores = predict(res.classifier, x_val);
    for (Eigen::Index i = 0; i < y_val.size(); ++i) {
      if (y_val(i) != 0.0) continue;
      (val_scores(i) < 0.5 ? res.detected_false : res.undetected_false)++;
    }

    for (std::size_t t = 0; t < targets.size(); ++t) {
      RegressionScores rs;
      rs.target = config.targets[t];
      const Eigen::VectorXd rt = take(targets[t], split.train);
      const Eigen::VectorXd rv = take(targets[t], split.val);

      MetaModel lin = fit_linear(zt, rt);
      lin.standardizer = std_all;
      score_regressor(lin, x_train, rt, rs.train_sigma, rs.train_r2);
      score_regressor(lin, x_val, rv, rs.val_sigma, rs.val_r2);

      MetaModel lin_e = fit_linear(std_e.apply(et), rt);
      lin_e.standardizer = std_e;
      score_regressor(lin_e, et, rt, rs.entropy_train_sigma, rs.entropy_train_r2);
      score_regressor(lin_e, ev, rv, rs.entropy_val_sigma, rs.entropy_val_r2);

      res.regression.push_back(rs);
      res.regressors.push_back(std::move(lin));
    }
    report.runs.push_back(std::move(res));
  }
  return report;
}

std::vector<ReportRow> report_rows(const ExperimentReport& report) {
  std::vector<ReportRow> rows;
  const auto add = [&](const char* task, const char* config, const char* metric,
                       const char* subset, int run, double v) {
    rows.push_back({task, config, metric, subset, run, v});
  };
  const auto add_class = [&](const char* config, const ClassScores& s, int run) {
    add("classification", config, "acc", "train", run, s.train_acc);
    add("classification", config, "acc", "val", run, s.val_acc);
    add("classification", config, "auroc", "train", run, s.train_auroc);
    add("classification", config, "auroc", "val", run, s.val_auroc);
  };
  for (const RunResult& r : report.runs) {
    add_class("penalized", r.penalized, r.run);
    add_class("unpenalized", r.unpenalized, r.run);
    add_class("entropy_only", r.entropy_only, r.run);
    add_class("naive", r.naive, r.run);
    add("classification", "penalized", "lambda", "train", r.run, r.lambda);
    add("classification", "penalized", "active_features", "train", r.run,
        static_cast<double>(r.active_features));
    add("classification", "penalized", "detected_false", "val", r.run,
        static_cast<double>(r.detected_false));
    add("classification", "penalized", "undetected_false", "val", r.run,
        static_cast<double>(r.undetected_false));
    for (const RegressionScores& s : r.regression) {
      const std::string task = "regression_" + std::string(to_string(s.target));
      const auto reg = [&](const char* config, const char* metric, const char* subset, double v) {
        rows.push_back({task, config, metric, subset, r.run, v});
      };
      reg("all_metrics", "sigma", "train", s.train_sigma);
      reg("all_metrics", "sigma", "val", s.val_sigma);
      reg("all_metrics", "r2", "train", s.train_r2);
      reg("all_metrics", "r2", "val", s.val_r2);
      reg("entropy_only", "sigma", "train", s.entropy_train_sigma);
      reg("entropy_only", "sigma", "val", s.entropy_val_sigma);
      reg("entropy_only", "r2", "train", s.entropy_train_r2);
      reg("entropy_only", "r2", "val", s.entropy_val_r2);
    }
  }
  return rows;
}

}  // namespace metaseg
