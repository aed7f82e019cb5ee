// SPDX-License-Identifier: Apache-2.0
#include "metaseg/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "metaseg/error.hpp"

namespace metaseg {
namespace {

std::string printf_string(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

std::string g9(double v) { return printf_string("%.9g", v); }

void add_comment(std::string& out, std::string_view comment) {
  if (comment.empty()) return;
  out += "# ";
  out += comment;
  out += '\n';
}

using GroupKey = std::tuple<std::string, std::string, std::string, std::string>;

struct Group {
  GroupKey key;
  std::vector<double> values;
};

// Groups in first-appearance order.
std::vector<Group> group_rows(const std::vector<ReportRow>& rows) {
  std::vector<Group> groups;
  for (const ReportRow& r : rows) {
    GroupKey key{r.task, r.config, r.metric, r.subset};
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.key == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = groups.end() - 1;
    }
    it->values.push_back(r.value);
  }
  return groups;
}

Aggregate lookup(const std::vector<Group>& groups, const std::string& task, const std::string& config,
                 const std::string& metric, const std::string& subset) {
  const GroupKey key{task, config, metric, subset};
  for (const Group& g : groups) {
    if (g.key == key) return aggregate(g.values);
  }
  return {std::nan(""), std::nan("")};
}

std::string pct(const Aggregate& a) {
  return printf_string("%6.2f%% +- %5.2f%%", 100.0 * a.mean, 100.0 * a.std_error);
}

std::string plain(const Aggregate& a) { return printf_string("%7.4f +- %6.4f", a.mean, a.std_error); }

}  // namespace

std::string format_report_csv(const ExperimentReport& report, std::string_view comment) {
  std::string out;
  add_comment(out, comment);
  out += "task,config,metric,subset,run,value\n";
  const std::vector<ReportRow> rows = report_rows(report);
  for (const ReportRow& r : rows) {
    out += r.task + ',' + r.config + ',' + r.metric + ',' + r.subset + ',' + std::to_string(r.run) +
           ',' + g9(r.value) + '\n';
  }
  for (const Group& g : group_rows(rows)) {
    const auto& [task, config, metric, subset] = g.key;
    const Aggregate a = aggregate(g.values);
    const std::string prefix = task + ',' + config + ',' + metric + ',' + subset + ',';
    out += prefix + "mean," + g9(a.mean) + '\n';
    out += prefix + "stderr," + g9(a.std_error) + '\n';
  }
  return out;
}

std::string format_report_text(const ExperimentReport& report, std::string_view comment) {
  const std::vector<Group> groups = group_rows(report_rows(report));
  std::string out;
  add_comment(out, comment);
  out += printf_string("segments: %zu (I0 = %zu, I1 = %zu), runs: %zu\n\n", report.i0 + report.i1,
                       report.i0, report.i1, report.runs.size());

  out += "Meta classification (IoU_adj = 0 vs > 0), mean +- stderr over runs\n";
  out += printf_string("%-14s %-20s %-20s %-20s %-20s\n", "", "ACC train", "ACC val", "AUROC train",
                       "AUROC val");
  for (const char* config : {"penalized", "unpenalized", "entropy_only", "naive"}) {
    const auto get = [&](const char* metric, const char* subset) {
      return pct(lookup(groups, "classification", config, metric, subset));
    };
    out += printf_string("%-14s %-20s %-20s %-20s %-20s\n", config, get("acc", "train").c_str(),
                         get("acc", "val").c_str(), get("auroc", "train").c_str(),
                         get("auroc", "val").c_str());
  }
  const Aggregate lambda = lookup(groups, "classification", "penalized", "lambda", "train");
  const Aggregate active = lookup(groups, "classification", "penalized", "active_features", "train");
  const Aggregate detected = lookup(groups, "classification", "penalized", "detected_false", "val");
  const Aggregate missed = lookup(groups, "classification", "penalized", "undetected_false", "val");
  out += printf_string("selected lambda: %.6g +- %.2g, active features: %.1f of %zu\n", lambda.mean,
                       lambda.std_error, active.mean, report.columns.size());
  out += printf_string("false positives in validation (threshold 0.5): %.1f detected, %.1f undetected\n",
                       detected.mean, missed.mean);

  if (!report.runs.empty()) {
    for (const RegressionScores& rs : report.runs.front().regression) {
      const std::string task = "regression_" + std::string(to_string(rs.target));
      out += "\nRegression of " + std::string(to_string(rs.target)) + ", mean +- stderr over runs\n";
      out += printf_string("%-14s %-20s %-20s %-20s %-20s\n", "", "sigma train", "sigma val",
                           "R2 train", "R2 val");
      for (const char* config : {"all_metrics", "entropy_only"}) {
        out += printf_string("%-14s %-20s %-20s %-20s %-20s\n", config,
                             plain(lookup(groups, task, config, "sigma", "train")).c_str(),
                             plain(lookup(groups, task, config, "sigma", "val")).c_str(),
                             pct(lookup(groups, task, config, "r2", "train")).c_str(),
                             pct(lookup(groups, task, config, "r2", "val")).c_str());
      }
    }
  }

  out += "\nPearson correlation with IoU_adj\n";
  for (std::size_t j = 0; j < report.columns.size() && j < report.correlations.size(); ++j) {
    out += printf_string("%-10s %+.4f\n", report.columns[j].c_str(), report.correlations[j]);
  }
  return out;
}

std::string format_correlations_csv(const ExperimentReport& report, std::string_view comment) {
  std::string out;
  add_comment(out, comment);
  out += "metric,pearson_iou_adj\n";
  for (std::size_t j = 0; j < report.columns.size() && j < report.correlations.size(); ++j) {
    out += report.columns[j] + ',' + g9(report.correlations[j]) + '\n';
  }
  return out;
}

std::string format_lasso_path_csv(const ExperimentReport& report, std::string_view comment) {
  std::string out;
  add_comment(out, comment);
  out += "lambda,active,train_acc,val_acc,val_auroc,refit_val_acc,refit_val_auroc,intercept";
  for (const auto& c : report.columns) out += ",w_" + c;
  out += '\n';
  if (report.runs.empty()) return out;
  for (const PathPoint& p : report.runs.front().path.points) {
    out += g9(p.lambda) + ',' + std::to_string(p.model.active_set().size()) + ',' + g9(p.train_acc) +
           ',' + g9(p.val_acc) + ',' + g9(p.val_auroc) + ',' + g9(p.refit_val_acc) + ',' +
           g9(p.refit_val_auroc) + ',' + g9(p.model.intercept);
    for (Eigen::Index j = 0; j < p.model.weights.size(); ++j) out += ',' + g9(p.model.weights(j));
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

}  // namespace metaseg
