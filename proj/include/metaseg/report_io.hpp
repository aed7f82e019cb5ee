// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "metaseg/experiment.hpp"

namespace metaseg {

/// Flat CSV: task,config,metric,subset,run,value with one row per run and
/// trailing `mean` / `stderr` rows per group.
std::string format_report_csv(const ExperimentReport& report, std::string_view comment = {});

/// Human-readable summary (mean +- stderr) of classification, regression and
/// per-metric correlations.
std::string format_report_text(const ExperimentReport& report, std::string_view comment = {});

/// metric,pearson_iou_adj
std::string format_correlations_csv(const ExperimentReport& report, std::string_view comment = {});

/// LASSO path of the first run: lambda, accuracy, AUROC and all weights.
std::string format_lasso_path_csv(const ExperimentReport& report, std::string_view comment = {});

/// Writes text to `path`, throwing IoFailure on error.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace metaseg
