// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metaseg/regression.hpp"
#include "metaseg/seg_metrics.hpp"

namespace metaseg {

struct SplitPlan {
  std::uint64_t seed = 1;
  int n_runs = 10;
  /// Share of records (or images) used for training.
  double fraction = 0.5;
  /// Split whole images instead of individual segments.
  bool image_level = false;
};

struct Split {
  std::vector<std::size_t> train;  ///< ascending record indices
  std::vector<std::size_t> val;
};

/// Run `run` shuffles with derive_seed(plan.seed, run). Train and validation
/// partition the records and are both non-empty.
Split make_split(const std::vector<SegmentRecord>& records, const SplitPlan& plan, int run);

struct ExperimentConfig {
  SplitPlan plan;
  int grid_count = 50;
  double grid_ratio = 1e-4;
  std::vector<RegressionTarget> targets = {RegressionTarget::IoUAdj};
  SolverOptions solver;
};

struct ClassScores {
  double train_acc = 0.0;
  double train_auroc = 0.0;
  double val_acc = 0.0;
  double val_auroc = 0.0;
};

struct RegressionScores {
  RegressionTarget target = RegressionTarget::IoUAdj;
  double train_sigma = 0.0, train_r2 = 0.0, val_sigma = 0.0, val_r2 = 0.0;
  double entropy_train_sigma = 0.0, entropy_train_r2 = 0.0;
  double entropy_val_sigma = 0.0, entropy_val_r2 = 0.0;
};

struct RunResult {
  int run = 0;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  double lambda = 0.0;
  std::size_t active_features = 0;
  ClassScores penalized;
  ClassScores unpenalized;
  ClassScores entropy_only;
  ClassScores naive;
  std::vector<RegressionScores> regression;
  /// Validation segments with IoU_adj = 0 that the penalized model flags
  /// (score < 0.5) or misses.
  std::size_t detected_false = 0;
  std::size_t undetected_false = 0;
  LassoPath path;
  MetaModel classifier;                ///< penalized, with its standardizer
  std::vector<MetaModel> regressors;   ///< all-metrics linear model per target
};

struct ExperimentReport {
  std::vector<std::string> columns;
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  std::vector<RunResult> runs;
  /// Pearson correlation of every metric column with IoU_adj; NaN when the
  /// column is constant.
  std::vector<double> correlations;
};

/// Repeated-split protocol: per run standardize on the training part, fit a
/// LASSO path and pick lambda by validation accuracy, refit the selected
/// features without penalty, fit the entropy-only and linear models.
/// Requires at least two records of each meta-class.
ExperimentReport run_experiment(const std::vector<SegmentRecord>& records,
                                const ExperimentConfig& config);

struct Aggregate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard deviation of the mean (sample sd / sqrt(n)).
Aggregate aggregate(const std::vector<double>& values);

/// One value of the flat report: task,config,metric,subset,run,value.
struct ReportRow {
  std::string task;
  std::string config;
  std::string metric;
  std::string subset;
  int run = 0;
  double value = 0.0;
};

/// Per-run rows in a fixed order.
std::vector<ReportRow> report_rows(const ExperimentReport& report);

}  // namespace metaseg
