// SPDX-License-Identifier: Apache-2.0
#include "metaseg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "metaseg/dispersion.hpp"
#include "metaseg/error.hpp"
#include "metaseg/model_io.hpp"
#include "metaseg/mst_io.hpp"
#include "metaseg/render.hpp"
#include "metaseg/report_io.hpp"
#include "metaseg/segment_table.hpp"

namespace fs = std::filesystem;

namespace metaseg {
namespace {

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string header(std::string_view cmd) {
  return "metaseg " + std::string(kVersion) + " " + std::string(cmd);
}

std::string_view q_name(QDefinition q) { return q == QDefinition::SameClass ? "same-class" : "literal"; }

std::string_view target_name(TargetChoice t) {
  switch (t) {
    case TargetChoice::IoUAdj: return "iou_adj";
    case TargetChoice::IoU: return "iou";
    case TargetChoice::Both: return "both";
  }
  return "?";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

constexpr std::string_view kProbsSuffix = ".probs.mst";
constexpr std::string_view kLabelsSuffix = ".labels.mst";

struct ScenePair {
  std::string stem;
  fs::path probs;
  fs::path labels;
};

std::vector<ScenePair> find_pairs(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::IoFailure, "not a directory: " + dir.string());
  std::vector<ScenePair> pairs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() <= kProbsSuffix.size() || !name.ends_with(kProbsSuffix)) continue;
    const std::string stem = name.substr(0, name.size() - kProbsSuffix.size());
    const fs::path labels = dir / (stem + std::string(kLabelsSuffix));
    if (!fs::exists(labels)) throw Error(ErrorKind::IoFailure, "missing label map " + labels.string());
    pairs.push_back({stem, entry.path(), labels});
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.stem < b.stem; });
  return pairs;
}

// Rethrows with the offending file named.
template <typename F>
auto with_path(const fs::path& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (std::string(e.what()).find(path.string()) != std::string::npos) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace

std::string provenance_line(const SynthConfig& c) {
  const SceneSpec& s = c.spec;
  return header("synth") + " scenes=" + std::to_string(c.scenes) + " seed=" + std::to_string(s.seed) +
         " size=" + std::to_string(s.height) + "x" + std::to_string(s.width) +
         " classes=" + std::to_string(s.num_classes) + " shapes=" + std::to_string(s.n_shapes) +
         " noise=" + g(s.noise_temperature) + " spurious=" + g(s.spurious_rate) +
         " blur=" + std::to_string(s.boundary_blur) + " shift=" + std::to_string(s.max_shift) +
         " split=" + g(s.split_rate);
}

std::string provenance_line(const MetricsConfig& c) {
  return header("metrics") + " ignore=" + std::to_string(c.ignore) + " q=" + std::string(q_name(c.q_def)) +
         " connectivity=8";
}

std::string provenance_line(const FitEvalConfig& c) {
  return header("fit-eval") + " runs=" + std::to_string(c.plan.n_runs) + " split=" + g(c.plan.fraction) +
         " seed=" + std::to_string(c.plan.seed) + " split_unit=" + (c.plan.image_level ? "image" : "segment") +
         " target=" + std::string(target_name(c.target)) + " grid=" + std::to_string(c.grid_count) +
         " grid_ratio=" + g(c.grid_ratio);
}

std::string provenance_line(const RenderConfig& c) {
  return header("render") + " ignore=" + std::to_string(c.ignore) + " q=" + std::string(q_name(c.q_def)) +
         " model=" + (c.model ? c.model->filename().string() : std::string("none"));
}

CommandResult cmd_synth(const SynthConfig& config) {
  const auto scenes = generate_corpus(config.spec, config.scenes);
  save_corpus(scenes, config.out, provenance_line(config));
  CommandResult res;
  char name[32];
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    std::snprintf(name, sizeof name, "scene_%04zu", i);
    res.written.push_back(config.out / (std::string(name) + ".probs.mst"));
    res.written.push_back(config.out / (std::string(name) + ".labels.mst"));
  }
  res.written.push_back(config.out / "injected_false.csv");
  return res;
}

CommandResult cmd_metrics(const MetricsConfig& config) {
  const auto pairs = find_pairs(config.in);
  if (pairs.empty()) {
    throw Error(ErrorKind::IoFailure, "no *" + std::string(kProbsSuffix) + " files in " + config.in.string());
  }
  ensure_dir(config.out);
  const std::string prov = provenance_line(config);
  ImageMetricsOptions options;
  options.q_def = config.q_def;

  SegmentTable table;
  std::string counts = "# " + prov + "\nimage_id,scene,segments,kept,dropped_empty_interior,dropped_no_ground_truth\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ProbTensor probs = with_path(pairs[i].probs, [&] { return load_tensor(pairs[i].probs); });
    if (i == 0) {
      table.num_classes = probs.num_classes();
    } else if (probs.num_classes() != table.num_classes) {
      throw Error(ErrorKind::DimensionMismatch, pairs[i].probs.string() + ": has " +
                                                    std::to_string(probs.num_classes()) + " classes, expected " +
                                                    std::to_string(table.num_classes));
    }
    const LabelMap labels = with_path(pairs[i].labels, [&] {
      return load_label_map(pairs[i].labels, probs.num_classes(), config.ignore);
    });
    ImageMetrics m = with_path(pairs[i].probs, [&] {
      return compute_image_metrics(probs, labels, static_cast<std::int64_t>(i), options);
    });
    counts += std::to_string(i) + ',' + pairs[i].stem + ',' + std::to_string(m.num_segments) + ',' +
              std::to_string(m.records.size()) + ',' + std::to_string(m.dropped_empty_interior) + ',' +
              std::to_string(m.dropped_no_ground_truth) + '\n';
    for (auto& r : m.records) table.rows.push_back(std::move(r));
  }

  CommandResult res;
  if (table.rows.empty()) {
    res.warnings.push_back("segment table is empty: no segment has both an interior and ground truth");
  }
  write_segment_table(table, config.out / "segments.csv", prov);
  write_text_file(config.out / "image_counts.csv", counts);
  res.written = {config.out / "segments.csv", config.out / "image_counts.csv"};
  return res;
}

CommandResult cmd_fit_eval(const FitEvalConfig& config) {
  const SegmentTable table = with_path(config.table, [&] { return read_segment_table(config.table); });
  if (table.rows.empty()) throw Error(ErrorKind::EmptyDataset, config.table.string() + ": no segments");

  ExperimentConfig ec;
  ec.plan = config.plan;
  ec.grid_count = config.grid_count;
  ec.grid_ratio = config.grid_ratio;
  switch (config.target) {
    case TargetChoice::IoUAdj: ec.targets = {RegressionTarget::IoUAdj}; break;
    case TargetChoice::IoU: ec.targets = {RegressionTarget::IoU}; break;
    case TargetChoice::Both: ec.targets = {RegressionTarget::IoUAdj, RegressionTarget::IoU}; break;
  }
  const ExperimentReport report = run_experiment(table.rows, ec);

  ensure_dir(config.out);
  const std::string prov = provenance_line(config);
  CommandResult res;
  const auto emit = [&](const char* name, const std::string& text) {
    write_text_file(config.out / name, text);
    res.written.push_back(config.out / name);
  };
  emit("report.csv", format_report_csv(report, prov));
  emit("report.txt", format_report_text(report, prov));
  emit("correlations.csv", format_correlations_csv(report, prov));
  emit("lasso_path.csv", format_lasso_path_csv(report, prov));
  const RunResult& first = report.runs.front();
  emit("meta_classifier.json", format_model(first.classifier, prov));
  emit("meta_regressor.json", format_model(first.regressors.front(), prov));
  for (const RunResult& r : report.runs) {
    if (r.path.truncated) {
      res.warnings.push_back("run " + std::to_string(r.run) +
                             ": LASSO path stopped early on (quasi-)separable data");
    }
  }
  return res;
}

CommandResult cmd_render(const RenderConfig& config) {
  const ProbTensor probs = with_path(config.probs, [&] { return load_tensor(config.probs); });
  const LabelMap labels = with_path(config.labels, [&] {
    return load_label_map(config.labels, probs.num_classes(), config.ignore);
  });
  if (labels.height != probs.height() || labels.width != probs.width()) {
    throw Error(ErrorKind::DimensionMismatch, "probabilities and labels differ in shape");
  }
  std::optional<MetaModel> model;
  if (config.model) model = with_path(*config.model, [&] { return load_model(*config.model); });

  ensure_dir(config.out);
  const std::string prov = provenance_line(config);
  CommandResult res;
  const auto emit = [&](const char* name, const Image& img) {
    write_png(img, config.out / name, prov);
    res.written.push_back(config.out / name);
  };
  emit("entropy.png", render_heatmap(entropy_map(probs)));
  emit("diff.png", render_heatmap(diff_map(probs)));

  ImageMetricsOptions options;
  options.q_def = config.q_def;
  const ImageMetrics m = compute_image_metrics(probs, labels, 0, options);
  const SegmentationDecomposition pred = connected_components(predict_classes(probs));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> truth(pred.segments.size(), nan);
  for (const auto& r : m.records) truth[static_cast<std::size_t>(r.segment_id)] = r.iou_adj;
  emit("iou_adj.png", render_iou_overlay(pred, truth, labels));

  if (model) {
    std::vector<double> estimate(pred.segments.size(), nan);
    if (!m.records.empty()) {
      const Dataset ds = build_dataset(m.records);
      const Eigen::VectorXd p = model->is_logistic() ? predict(*model, ds.features)
                                                     : predict_clamped(*model, ds.features);
      for (std::size_t k = 0; k < m.records.size(); ++k) {
        estimate[static_cast<std::size_t>(m.records[k].segment_id)] = p(static_cast<Eigen::Index>(k));
      }
    }
    emit("predicted.png", render_iou_overlay(pred, estimate, labels));
  }
  return res;
}

}  // namespace metaseg
