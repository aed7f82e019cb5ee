// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "metaseg/components.hpp"
#include "metaseg/tensor.hpp"

namespace metaseg {

inline constexpr std::size_t kNumSegmentMetrics = 15;

/// Column names of the 15 dispersion/size metrics, in table order.
inline constexpr std::array<std::string_view, kNumSegmentMetrics> kMetricNames = {
    "S",      "S_in",   "S_bd",     "S_rel", "S_in_rel", "E_mean", "E_in", "E_bd",
    "E_rel",  "E_in_rel", "D_mean", "D_in",  "D_bd",     "D_rel",  "D_in_rel",
};

/// Index of E_mean within the metric block; the entropy-only baseline uses it.
inline constexpr std::size_t kEntropyMeanColumn = 5;

struct SegmentRecord {
  std::int64_t image_id = 0;
  std::int32_t segment_id = 0;
  std::int32_t cls = 0;
  /// S, S_in, S_bd, S_rel, S_in_rel, E_mean, E_in, E_bd, E_rel, E_in_rel,
  /// D_mean, D_in, D_bd, D_rel, D_in_rel
  std::array<double, kNumSegmentMetrics> metrics{};
  /// Segment-mean probability per class.
  std::vector<double> mean_probs;
  double iou = 0.0;
  double iou_adj = 0.0;
  double ios = 0.0;

  double metric(std::string_view name) const;
};

/// How the set Q of "covering" predicted segments is formed for IoU_adj.
enum class QDefinition {
  SameClass,  ///< only predicted segments of k's class (default)
  Literal,    ///< every predicted segment intersecting K'
};

struct GroundTruthMatch {
  /// Ground-truth component ids whose union is K'.
  std::vector<std::int32_t> gt_ids;
  /// Predicted segment ids forming Q.
  std::vector<std::int32_t> covering_ids;
  /// Pixels of K', ascending.
  std::vector<std::uint32_t> kprime;
  std::size_t intersection = 0;  ///< |k n K'|
  std::size_t valid_size = 0;    ///< pixels of k with ground truth available
};

GroundTruthMatch match_ground_truth(const Segment& k, const SegmentationDecomposition& gt,
                                    const SegmentationDecomposition& pred,
                                    QDefinition q_def = QDefinition::SameClass);

double compute_iou(const Segment& k, const GroundTruthMatch& m);
double compute_iou_adj(const Segment& k, const GroundTruthMatch& m,
                       const SegmentationDecomposition& pred);
double compute_ios(const Segment& k, const GroundTruthMatch& m);

/// Throws EmptyInterior when `k` has no interior pixel.
SegmentRecord aggregate_segment_metrics(const Segment& k, const HeatMap& entropy,
                                        const HeatMap& diff, const ProbTensor& probs,
                                        const GroundTruthMatch& m,
                                        const SegmentationDecomposition& pred,
                                        std::int64_t image_id);

struct ImageMetricsOptions {
  QDefinition q_def = QDefinition::SameClass;
};

struct ImageMetrics {
  std::vector<SegmentRecord> records;
  std::size_t num_segments = 0;
  std::size_t dropped_empty_interior = 0;
  std::size_t dropped_no_ground_truth = 0;
};

/// Full per-image pipeline: argmax, heat maps, both decompositions, matching
/// and aggregation. Segments without interior or without any annotated pixel
/// are dropped and counted.
ImageMetrics compute_image_metrics(const ProbTensor& probs, const LabelMap& labels,
                                   std::int64_t image_id,
                                   const ImageMetricsOptions& options = {});

enum class RegressionTarget { IoUAdj, IoU };

std::string_view to_string(RegressionTarget target);

struct Dataset {
  Eigen::MatrixXd features;  ///< n x (15 + q), column order of the segment table
  Eigen::VectorXd y_cls;     ///< 0 if IoU_adj == 0 else 1
  Eigen::VectorXd y_reg;
  std::vector<std::string> column_names;
};

Dataset build_dataset(const std::vector<SegmentRecord>& records,
                      RegressionTarget target = RegressionTarget::IoUAdj);

}  // namespace metaseg
