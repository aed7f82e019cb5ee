// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaseg/experiment.hpp"
#include "metaseg/synth.hpp"

namespace metaseg {

inline constexpr std::string_view kVersion = "0.1.0";

/// Files written and warnings raised by a command.
struct CommandResult {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

struct SynthConfig {
  std::filesystem::path out;
  std::size_t scenes = 200;
  SceneSpec spec;
};

struct MetricsConfig {
  std::filesystem::path in;
  std::filesystem::path out;
  std::int32_t ignore = kDefaultIgnore;
  QDefinition q_def = QDefinition::SameClass;
};

enum class TargetChoice { IoUAdj, IoU, Both };

struct FitEvalConfig {
  std::filesystem::path table;
  std::filesystem::path out;
  SplitPlan plan;
  TargetChoice target = TargetChoice::IoUAdj;
  int grid_count = 50;
  double grid_ratio = 1e-4;
};

struct RenderConfig {
  std::filesystem::path probs;
  std::filesystem::path labels;
  std::filesystem::path out;
  std::int32_t ignore = kDefaultIgnore;
  QDefinition q_def = QDefinition::SameClass;
  /// Optional model whose predictions are drawn as a second overlay.
  std::optional<std::filesystem::path> model;
};

/// Leading comment line of every output: tool version, command and the
/// parameters that determine the output. Paths are left out so that runs in
/// different directories stay byte-identical.
std::string provenance_line(const SynthConfig& c);
std::string provenance_line(const MetricsConfig& c);
std::string provenance_line(const FitEvalConfig& c);
std::string provenance_line(const RenderConfig& c);

/// <out>/scene_NNNN.{probs,labels}.mst and injected_false.csv.
CommandResult cmd_synth(const SynthConfig& config);

/// <out>/segments.csv and <out>/image_counts.csv from every
/// <stem>.probs.mst / <stem>.labels.mst pair in <in>, in name order.
CommandResult cmd_metrics(const MetricsConfig& config);

/// report.csv, report.txt, correlations.csv, lasso_path.csv and the first
/// run's models (meta_classifier.json, meta_regressor.json) under <out>.
CommandResult cmd_fit_eval(const FitEvalConfig& config);

/// entropy.png, diff.png, iou_adj.png and, with a model, predicted.png.
CommandResult cmd_render(const RenderConfig& config);

}  // namespace metaseg
