// SPDX-License-Identifier: Apache-2.0
// metaseg: segment-wise uncertainty metrics and meta models for semantic
// segmentation outputs.
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "metaseg/commands.hpp"
#include "metaseg/error.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericalFailure = 3 };

void report(const metaseg::CommandResult& res) {
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& p : res.written) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-wise dispersion metrics, meta classification and meta regression"};
  app.set_version_flag("--version", std::string(metaseg::kVersion));
  app.require_subcommand(1);

  metaseg::SynthConfig synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic corpus of scenes");
  c_synth->add_option("--out", synth.out, "Output directory")->required();
  c_synth->add_option("--scenes", synth.scenes, "Number of scenes")->check(CLI::PositiveNumber);
  c_synth->add_option("--seed", synth.spec.seed, "Random seed");
  c_synth->add_option("--height", synth.spec.height, "Scene height")->check(CLI::Range(8, 4096));
  c_synth->add_option("--width", synth.spec.width, "Scene width")->check(CLI::Range(8, 4096));
  c_synth->add_option("--classes", synth.spec.num_classes, "Number of classes")->check(CLI::Range(2, 255));
  c_synth->add_option("--shapes", synth.spec.n_shapes, "Ground-truth shapes per scene")->check(CLI::NonNegativeNumber);
  c_synth->add_option("--noise", synth.spec.noise_temperature, "Softmax temperature")->check(CLI::PositiveNumber);
  c_synth->add_option("--spurious", synth.spec.spurious_rate, "Spurious shape rate")->check(CLI::Range(0.0, 1.0));
  c_synth->add_option("--blur", synth.spec.boundary_blur, "Boundary blur radius")->check(CLI::NonNegativeNumber);
  c_synth->add_option("--shift", synth.spec.max_shift, "Largest prediction shift")->check(CLI::NonNegativeNumber);
  c_synth->add_option("--split-rate", synth.spec.split_rate, "Chance of a split prediction")->check(CLI::Range(0.0, 1.0));

  metaseg::MetricsConfig metrics;
  bool q_literal = false;
  auto* c_metrics = app.add_subcommand("metrics", "Compute the per-segment metric table");
  c_metrics->add_option("--in", metrics.in, "Directory of <stem>.probs.mst / <stem>.labels.mst pairs")->required();
  c_metrics->add_option("--out", metrics.out, "Output directory")->required();
  c_metrics->add_option("--ignore", metrics.ignore, "Ground-truth label without annotation");
  c_metrics->add_flag("--q-literal", q_literal, "Let every covering predicted segment enter IoU_adj");

  metaseg::FitEvalConfig fit;
  std::string target = "iou_adj";
  auto* c_fit = app.add_subcommand("fit-eval", "Run the repeated-split meta model experiment");
  c_fit->add_option("--table", fit.table, "Segment table (segments.csv)")->required();
  c_fit->add_option("--out", fit.out, "Output directory")->required();
  c_fit->add_option("--runs", fit.plan.n_runs, "Number of random splits")->check(CLI::PositiveNumber);
  c_fit->add_option("--split", fit.plan.fraction, "Training share")->check(CLI::Range(0.0, 1.0));
  c_fit->add_option("--seed", fit.plan.seed, "Random seed");
  c_fit->add_option("--target", target, "Regression target")
      ->check(CLI::IsMember({"iou", "iou_adj", "both"}));
  c_fit->add_flag("--image-split", fit.plan.image_level, "Split by image instead of by segment");
  c_fit->add_option("--grid", fit.grid_count, "Number of positive lambda values")->check(CLI::Range(1, 10000));
  c_fit->add_option("--grid-ratio", fit.grid_ratio, "Smallest / largest positive lambda")
      ->check(CLI::Range(1e-12, 1.0));

  metaseg::RenderConfig render;
  std::string model_path;
  bool render_q_literal = false;
  auto* c_render = app.add_subcommand("render", "Render heat maps and IoU_adj overlays as PNG");
  c_render->add_option("--probs", render.probs, "Probability tensor (.mst)")->required();
  c_render->add_option("--labels", render.labels, "Label map (.mst)")->required();
  c_render->add_option("--out", render.out, "Output directory")->required();
  c_render->add_option("--ignore", render.ignore, "Ground-truth label without annotation");
  c_render->add_option("--model", model_path, "Meta model JSON for a predicted overlay");
  c_render->add_flag("--q-literal", render_q_literal, "Let every covering predicted segment enter IoU_adj");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_synth) {
      report(metaseg::cmd_synth(synth));
    } else if (*c_metrics) {
      metrics.q_def = q_literal ? metaseg::QDefinition::Literal : metaseg::QDefinition::SameClass;
      report(metaseg::cmd_metrics(metrics));
    } else if (*c_fit) {
      static const std::map<std::string, metaseg::TargetChoice> targets = {
          {"iou", metaseg::TargetChoice::IoU},
          {"iou_adj", metaseg::TargetChoice::IoUAdj},
          {"both", metaseg::TargetChoice::Both}};
      fit.target = targets.at(target);
      report(metaseg::cmd_fit_eval(fit));
    } else if (*c_render) {
      render.q_def = render_q_literal ? metaseg::QDefinition::Literal : metaseg::QDefinition::SameClass;
      if (!model_path.empty()) render.model = model_path;
      report(metaseg::cmd_render(render));
    }
  } catch (const metaseg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == metaseg::ErrorKind::InvalidArgument) return kUsage;
    return metaseg::is_numerical(e.kind()) ? kNumericalFailure : kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}
