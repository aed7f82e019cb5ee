// SPDX-License-Identifier: Apache-2.0
#include "metaseg/seg_metrics.hpp"

#include <algorithm>
#include <charconv>

#include "metaseg/dispersion.hpp"
#include "metaseg/error.hpp"

namespace metaseg {

double SegmentRecord::metric(std::string_view name) const {
  for (std::size_t i = 0; i < kNumSegmentMetrics; ++i) {
    if (kMetricNames[i] == name) return metrics[i];
  }
  if (name == "iou") return iou;
  if (name == "iou_adj") return iou_adj;
  if (name == "ios") return ios;
  if (name.starts_with("P_")) {
    std::size_t j = 0;
    const auto tail = name.substr(2);
    const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), j);
    if (ec == std::errc{} && ptr == tail.data() + tail.size() && j < mean_probs.size()) {
      return mean_probs[j];
    }
  }
  throw Error(ErrorKind::EmptyInput, "unknown segment column '" + std::string(name) + "'");
}

GroundTruthMatch match_ground_truth(const Segment& k, const SegmentationDecomposition& gt,
                                    const SegmentationDecomposition& pred, QDefinition q_def) {
  if (gt.height != pred.height || gt.width != pred.width) {
    throw Error(ErrorKind::DimensionMismatch, "ground truth and prediction differ in size");
  }
  GroundTruthMatch m;
  for (std::uint32_t z : k.pixels) {
    const std::int32_t g = gt.pixel_to_segment[z];
    if (g < 0) continue;
    ++m.valid_size;
    if (gt.segments[g].cls == k.cls) m.gt_ids.push_back(g);
  }
  std::sort(m.gt_ids.begin(), m.gt_ids.end());
  m.gt_ids.erase(std::unique(m.gt_ids.begin(), m.gt_ids.end()), m.gt_ids.end());

  for (std::int32_t g : m.gt_ids) {
    const auto& px = gt.segments[g].pixels;
    m.kprime.insert(m.kprime.end(), px.begin(), px.end());
  }
  std::sort(m.kprime.begin(), m.kprime.end());

  for (std::uint32_t z : m.kprime) {
    const std::int32_t p = pred.pixel_to_segment[z];
    if (p == k.id) ++m.intersection;
    if (q_def == QDefinition::Literal || pred.segments[p].cls == k.cls) {
      m.covering_ids.push_back(p);
    }
  }
  std::sort(m.covering_ids.begin(), m.covering_ids.end());
  m.covering_ids.erase(std::unique(m.covering_ids.begin(), m.covering_ids.end()),
                       m.covering_ids.end());
  return m;
}

double compute_iou(const Segment&, const GroundTruthMatch& m) {
  if (m.kprime.empty()) return 0.0;
  const std::size_t uni = m.valid_size + m.kprime.size() - m.intersection;
  return static_cast<double>(m.intersection) / static_cast<double>(uni);
}

double compute_iou_adj(const Segment& k, const GroundTruthMatch& m,
                       const SegmentationDecomposition& pred) {
  if (m.kprime.empty()) return 0.0;
  std::size_t outside = 0;
  for (std::uint32_t z : m.kprime) {
    const std::int32_t p = pred.pixel_to_segment[z];
    if (p == k.id) continue;
    if (!std::binary_search(m.covering_ids.begin(), m.covering_ids.end(), p)) ++outside;
  }
  return static_cast<double>(m.intersection) / static_cast<double>(m.valid_size + outside);
}

double compute_ios(const Segment&, const GroundTruthMatch& m) {
  if (m.valid_size == 0) return 0.0;
  return static_cast<double>(m.intersection) / static_cast<double>(m.valid_size);
}

SegmentRecord aggregate_segment_metrics(const Segment& k, const HeatMap& entropy,
                                        const HeatMap& diff, const ProbTensor& probs,
                                        const GroundTruthMatch& m,
                                        const SegmentationDecomposition& pred,
                                        std::int64_t image_id) {
  if (!k.has_interior()) {
    throw Error(ErrorKind::EmptyInterior, "segment " + std::to_string(k.id) + " has no interior");
  }
  const auto mean_over = [](const std::vector<std::uint32_t>& px, const HeatMap& h) {
    double sum = 0.0;
    for (std::uint32_t z : px) sum += h.values[z];
    return sum / static_cast<double>(px.size());
  };

  const double s = static_cast<double>(k.size());
  const double s_in = static_cast<double>(k.interior.size());
  const double s_bd = static_cast<double>(k.boundary.size());
  const double s_rel = s / s_bd;
  const double s_in_rel = s_in / s_bd;
  const double e = mean_over(k.pixels, entropy);
  const double e_in = mean_over(k.interior, entropy);
  const double e_bd = mean_over(k.boundary, entropy);
  const double d = mean_over(k.pixels, diff);
  const double d_in = mean_over(k.interior, diff);
  const double d_bd = mean_over(k.boundary, diff);

  SegmentRecord rec;
  rec.image_id = image_id;
  rec.segment_id = k.id;
  rec.cls = k.cls;
  rec.metrics = {s,         s_in,  s_bd,  s_rel, s_in_rel,     e,           e_in, e_bd,
                 e * s_rel, e_in * s_in_rel, d, d_in, d_bd, d * s_rel, d_in * s_in_rel};

  rec.mean_probs.assign(probs.num_classes(), 0.0);
  for (std::uint32_t z : k.pixels) {
    const auto f = probs.pixel(z);
    for (std::size_t j = 0; j < f.size(); ++j) rec.mean_probs[j] += f[j];
  }
  for (double& p : rec.mean_probs) p /= s;

  rec.iou = compute_iou(k, m);
  rec.iou_adj = compute_iou_adj(k, m, pred);
  rec.ios = compute_ios(k, m);
  return rec;
}

ImageMetrics compute_image_metrics(const ProbTensor& probs, const LabelMap& labels,
                                   std::int64_t image_id, const ImageMetricsOptions& options) {
  if (probs.height() != labels.height || probs.width() != labels.width) {
    throw Error(ErrorKind::DimensionMismatch,
                "image " + std::to_string(image_id) + ": tensor and label map differ in size");
  }
  const HeatMap entropy = entropy_map(probs);
  const HeatMap diff = diff_map(probs);
  const SegmentationDecomposition pred = connected_components(predict_classes(probs));
  const SegmentationDecomposition gt = connected_components(labels);

  ImageMetrics out;
  out.num_segments = pred.segments.size();
  for (const Segment& k : pred.segments) {
    if (!k.has_interior()) {
      ++out.dropped_empty_interior;
      continue;
    }
    const GroundTruthMatch m = match_ground_truth(k, gt, pred, options.q_def);
    if (m.valid_size == 0) {
      ++out.dropped_no_ground_truth;
      continue;
    }
    out.records.push_back(aggregate_segment_metrics(k, entropy, diff, probs, m, pred, image_id));
  }
  return out;
}

std::string_view to_string(RegressionTarget target) {
  return target == RegressionTarget::IoU ? "iou" : "iou_adj";
}

Dataset build_dataset(const std::vector<SegmentRecord>& records, RegressionTarget target) {
  if (records.empty()) throw Error(ErrorKind::EmptyDataset, "no segment records");
  const std::size_t q = records.front().mean_probs.size();
  const std::size_t p = kNumSegmentMetrics + q;
  const auto n = static_cast<Eigen::Index>(records.size());

  Dataset ds;
  ds.features.resize(n, static_cast<Eigen::Index>(p));
  ds.y_cls.resize(n);
  ds.y_reg.resize(n);
  for (auto name : kMetricNames) ds.column_names.emplace_back(name);
  for (std::size_t j = 0; j < q; ++j) ds.column_names.push_back("P_" + std::to_string(j));

  for (Eigen::Index i = 0; i < n; ++i) {
    const SegmentRecord& r = records[static_cast<std::size_t>(i)];
    if (r.mean_probs.size() != q) {
      throw Error(ErrorKind::DimensionMismatch, "records disagree on the number of classes");
    }
    for (std::size_t j = 0; j < kNumSegmentMetrics; ++j) ds.features(i, static_cast<Eigen::Index>(j)) = r.metrics[j];
    for (std::size_t j = 0; j < q; ++j) {
      ds.features(i, static_cast<Eigen::Index>(kNumSegmentMetrics + j)) = r.mean_probs[j];
    }
    ds.y_cls(i) = r.iou_adj > 0.0 ? 1.0 : 0.0;
    ds.y_reg(i) = target == RegressionTarget::IoU ? r.iou : r.iou_adj;
  }
  return ds;
}

}  // namespace metaseg
