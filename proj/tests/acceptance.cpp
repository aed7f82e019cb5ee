// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "metaseg/commands.hpp"
#include "metaseg/dispersion.hpp"
#include "metaseg/error.hpp"
#include "metaseg/metrics.hpp"
#include "metaseg/regression.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace metaseg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome formula_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = 1 + rng.index(64), w = 1 + rng.index(64), q = 2 + rng.index(18);
    const ProbTensor t = oracle::random_tensor(rng, h, w, q);
    const HeatMap e = entropy_map(t), d = diff_map(t);
    for (std::size_t z = 0; z < t.num_pixels(); ++z) {
      const float* p = t.pixel(z).data();
      worst = std::max({worst, std::abs(e.values[z] - oracle::entropy(p, q)),
                        std::abs(d.values[z] - oracle::diff(p, q))});
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-7 && secs < 5.0, fmt("max deviation %.3g (tol 1e-7), %.2f s (limit 5 s)", worst, secs)};
}

Outcome component_oracle() {
  Rng rng(102);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto cls = oracle::random_classes(rng, 16, 16, rng.integer(2, 5));
    const auto d = connected_components(ClassMap{16, 16, cls});
    const auto ref = oracle::components(cls, 16, 16);
    std::map<std::int32_t, long> fwd;
    std::map<long, std::int32_t> bwd;
    for (std::size_t z = 0; z < 256; ++z) {
      const auto [a, na] = fwd.emplace(d.pixel_to_segment[z], ref[z]);
      const auto [b, nb] = bwd.emplace(ref[z], d.pixel_to_segment[z]);
      if (a->second != ref[z] || b->second != d.pixel_to_segment[z]) ++mismatches;
    }
    for (const Segment& s : d.segments) {
      for (auto z : s.interior) mismatches += !oracle::interior(ref, 16, 16, z);
      for (auto z : s.boundary) mismatches += oracle::interior(ref, 16, 16, z);
    }
  }
  return {mismatches == 0, fmt("%zu mismatches over 1000 maps", mismatches)};
}

Outcome iou_ordering(const std::vector<SegmentRecord>& records) {
  std::size_t order = 0, ceil_mismatch = 0;
  for (const auto& r : records) {
    order += !(r.iou_adj >= r.iou);
    ceil_mismatch += std::ceil(r.iou) != std::ceil(r.iou_adj);
  }
  return {order == 0 && ceil_mismatch == 0 && !records.empty(),
          fmt("%zu segments, %zu ordering and %zu ceil violations", records.size(), order, ceil_mismatch)};
}

Outcome split_segment() {
  const std::vector<std::int32_t> pred_cls = {1, 1, 2, 1, 1}, gt_cls = {1, 1, 1, 1, 1};
  const auto pred = connected_components(ClassMap{1, 5, pred_cls});
  const auto gt = connected_components(LabelMap{1, 5, gt_cls, kDefaultIgnore});
  const Segment& k = pred.segments[0];
  const auto m = match_ground_truth(k, gt, pred);
  const double iou = compute_iou(k, m), adj = compute_iou_adj(k, m, pred);
  const auto ref = oracle::set_iou(pred_cls, gt_cls, 1, 5, {0, 1}, kDefaultIgnore);
  const bool ok = std::abs(iou - ref.iou) < 1e-15 && std::abs(adj - ref.iou_adj) < 1e-15 &&
                  std::abs(ref.iou - 0.4) < 1e-15 && std::abs(ref.iou_adj - 2.0 / 3.0) < 1e-15;
  return {ok, fmt("IoU %.6f (oracle %.6f), IoU_adj %.6f (oracle %.6f)", iou, ref.iou, adj, ref.iou_adj)};
}

Outcome lasso_correctness() {
  Rng rng(105);
  double worst_kkt = 0.0, worst_obj = 0.0;
  bool zeros_ok = true;
  int problems = 0, points = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.index(25));
    const Eigen::Index n = std::max<Eigen::Index>(8 * p, 40 + static_cast<Eigen::Index>(rng.index(40)));
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    oracle::logistic_problem(rng, std::min<Eigen::Index>(n, 200), p, x, y, 0.5);
    x = fit_standardizer(x).apply(x);
    const double lmax = lambda_max(x, y);
    const auto grid = default_lambda_grid(lmax, 50, 1e-4);
    PathOptions opt;
    opt.with_refit = false;
    const LassoPath path = lasso_path(x, y, Eigen::MatrixXd(), Eigen::VectorXd(), grid, opt);
    if (path.truncated || path.points.size() != grid.size()) return {false, fmt("problem %d path truncated", trial)};
    for (const PathPoint& pt : path.points) {
      const Eigen::VectorXd g = logistic_gradient(x, y, pt.model.weights, pt.model.intercept);
      for (Eigen::Index j = 0; j < p; ++j) {
        const double wj = pt.model.weights(j);
        const double v = wj != 0.0 ? std::abs(g(j) + pt.lambda * (wj > 0 ? 1.0 : -1.0))
                                   : std::max(0.0, std::abs(g(j)) - pt.lambda);
        worst_kkt = std::max(worst_kkt, v);
      }
      ++points;
    }
    for (double f : {1.0, 2.0}) zeros_ok = zeros_ok && fit_lasso_logistic(x, y, f * lmax).weights.isZero(0.0);
    const MetaModel& end = path.points.back().model;
    const oracle::Fit ref = oracle::irls(x, y);
    const double obj = logistic_objective(x, y, end.weights, end.intercept, 0.0);
    worst_obj = std::max(worst_obj, std::abs(obj - oracle::objective(x, y, ref.w, ref.b, 0.0)));
    ++problems;
  }
  return {worst_kkt <= 1e-6 && worst_obj <= 1e-6 && zeros_ok,
          fmt("%d problems, %d path points: max KKT violation %.3g, lambda=0 objective gap %.3g, "
              "zero model above lambda_max: %s",
              problems, points, worst_kkt, worst_obj, zeros_ok ? "yes" : "no")};
}

Outcome auroc_correctness() {
  Rng rng(106);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.index(300);
    std::vector<double> s(n), y(n);
    const std::uint64_t levels = 2 + rng.index(20);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.3 + 0.4 * rng.uniform()) ? 1.0 : 0.0;
      s[i] = static_cast<double>(rng.index(levels)) + 0.5 * y[i] * rng.uniform();
    }
    y[0] = 0.0;
    y[1] = 1.0;
    worst = std::max(worst, std::abs(auroc(s, y) - oracle::auroc_pairs(s, y)));
  }
  return {worst <= 1e-12, fmt("max deviation %.3g over 500 sets (tol 1e-12)", worst)};
}

double mean_of(const ExperimentReport& rep, const std::function<double(const RunResult&)>& f) {
  double s = 0.0;
  for (const auto& r : rep.runs) s += f(r);
  return s / static_cast<double>(rep.runs.size());
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return fs::exists(a) && fs::exists(b) && testing::read_bytes(a) == testing::read_bytes(b);
}

Outcome determinism() {
  testing::TempDir root("acceptance");
  std::size_t compared = 0, differing = 0;
  for (const char* tag : {"a", "b"}) {
    const fs::path base = root / tag;
    SynthConfig sc;
    sc.out = base / "corpus";
    sc.scenes = 200;
    cmd_synth(sc);
    MetricsConfig mc;
    mc.in = sc.out;
    mc.out = base / "metrics";
    cmd_metrics(mc);
    FitEvalConfig fc;
    fc.table = mc.out / "segments.csv";
    fc.out = base / "fit";
    fc.target = TargetChoice::Both;
    cmd_fit_eval(fc);
    RenderConfig rc;
    rc.probs = sc.out / "scene_0000.probs.mst";
    rc.labels = sc.out / "scene_0000.labels.mst";
    rc.model = fc.out / "meta_classifier.json";
    rc.out = base / "render";
    cmd_render(rc);
  }
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    ++compared;
    differing += !same_bytes(entry.path(), root / "b" / rel);
  }
  return {compared > 400 && differing == 0, fmt("%zu files compared, %zu differ", compared, differing)};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  const auto guarded = [](const std::function<Outcome()>& f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "formula fidelity", guarded(formula_fidelity));
  report(2, "component oracle", guarded(component_oracle));

  // Seed-pinned default corpus shared by criteria 3, 7, 8 and 10.
  std::vector<SegmentRecord> records;
  CorpusSummary summary;
  const auto corpus_status = guarded([&] {
    records = corpus_records(generate_corpus(SceneSpec{}, 200), {}, &summary);
    return Outcome{true, ""};
  });
  report(3, "IoU ordering", corpus_status.pass ? guarded([&] { return iou_ordering(records); }) : corpus_status);
  report(4, "split-segment scenario", guarded(split_segment));
  report(5, "LASSO correctness", guarded(lasso_correctness));
  report(6, "AUROC correctness", guarded(auroc_correctness));

  ExperimentReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  const Outcome exp_status = corpus_status.pass ? guarded([&] {
    ExperimentConfig config;
    config.targets = {RegressionTarget::IoUAdj, RegressionTarget::IoU};
    rep = run_experiment(records, config);
    return Outcome{true, ""};
  }) : corpus_status;
  const double exp_secs = seconds_since(t0);

  report(7, "direction-matching experiment", !exp_status.pass ? exp_status : [&] {
    const double auc_all = mean_of(rep, [](const RunResult& r) { return r.penalized.val_auroc; });
    const double auc_e = mean_of(rep, [](const RunResult& r) { return r.entropy_only.val_auroc; });
    const double r2_all = mean_of(rep, [](const RunResult& r) { return r.regression[0].val_r2; });
    const double r2_e = mean_of(rep, [](const RunResult& r) { return r.regression[0].entropy_val_r2; });
    const double naive_acc = mean_of(rep, [](const RunResult& r) { return r.naive.val_acc; });
    const double acc_all = mean_of(rep, [](const RunResult& r) { return r.penalized.val_acc; });
    const double acc_e = mean_of(rep, [](const RunResult& r) { return r.entropy_only.val_acc; });
    const bool ok = auc_all - auc_e >= 0.02 && r2_all - r2_e >= 0.03 && auc_all > kNaiveAuroc &&
                    auc_e > kNaiveAuroc && acc_all > naive_acc && acc_e > naive_acc && r2_all > 0.0 && r2_e > 0.0;
    return Outcome{ok, fmt("%zu segments (I0 %zu, I1 %zu), %zu runs; val AUROC %.2f%% vs entropy-only %.2f%% "
                           "(gap %.2f pp, need 2); val R2 %.2f%% vs %.2f%% (gap %.2f pp, need 3); "
                           "val ACC %.2f%% / %.2f%% vs naive %.2f%%; %.1f s",
                           summary.segments, summary.i0, summary.i1, rep.runs.size(), 100 * auc_all,
                           100 * auc_e, 100 * (auc_all - auc_e), 100 * r2_all, 100 * r2_e,
                           100 * (r2_all - r2_e), 100 * acc_all, 100 * acc_e, 100 * naive_acc, exp_secs)};
  }());

  report(8, "correlation signs", !exp_status.pass ? exp_status : [&] {
    const double rho_e = rep.correlations[kEntropyMeanColumn];
    const double rho_d = rep.correlations[10];
    const bool ok = rho_e < 0 && rho_d < 0 && std::abs(rho_e) > 0.3 && std::abs(rho_d) > 0.3;
    return Outcome{ok, fmt("rho(E_mean, IoU_adj) = %.4f, rho(D_mean, IoU_adj) = %.4f", rho_e, rho_d)};
  }());

  report(9, "determinism", guarded(determinism));

  report(10, "regression-target comparison", !exp_status.pass ? exp_status : [&] {
    const double r2_adj = mean_of(rep, [](const RunResult& r) { return r.regression[0].val_r2; });
    const double r2_iou = mean_of(rep, [](const RunResult& r) { return r.regression[1].val_r2; });
    return Outcome{r2_adj >= r2_iou, fmt("val R2 IoU_adj %.2f%% vs IoU %.2f%%", 100 * r2_adj, 100 * r2_iou)};
  }());

  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
