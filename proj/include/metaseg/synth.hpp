// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "metaseg/seg_metrics.hpp"
#include "metaseg/tensor.hpp"

namespace metaseg {

struct SceneSpec {
  std::size_t height = 128;
  std::size_t width = 128;
  std::size_t num_classes = 5;
  /// Ground-truth foreground shapes per scene (rectangles and ellipses).
  int n_shapes = 12;
  /// Base softmax temperature; per-segment temperatures scale it.
  double noise_temperature = 0.3;
  /// Chance, per ground-truth shape, of also injecting a spurious predicted
  /// shape on background.
  double spurious_rate = 0.5;
  /// Chebyshev radius around predicted class edges where distributions mix.
  int boundary_blur = 1;
  /// Largest per-axis displacement of a predicted shape from its ground truth.
  int max_shift = 3;
  /// Chance that a background stripe cuts a predicted shape in two.
  double split_rate = 0.4;
  std::uint64_t seed = 1;
};

/// Predicted segment known to have no overlap with its class in the ground
/// truth, identified by one of its pixels.
struct FalseSegmentDescriptor {
  std::size_t row = 0;
  std::size_t col = 0;
  std::int32_t cls = 0;
};

struct SyntheticScene {
  LabelMap gt;
  ProbTensor probs;
  std::vector<FalseSegmentDescriptor> injected_false;
};

/// Throws SpecInfeasible when the shapes cannot be placed, InvalidArgument on
/// an out-of-range spec.
SyntheticScene generate_scene(const SceneSpec& spec);

/// Scene i uses derive_seed(spec.seed, i).
std::vector<SyntheticScene> generate_corpus(const SceneSpec& spec, std::size_t n_scenes);

struct CorpusSummary {
  std::size_t segments = 0;
  std::size_t i0 = 0;  ///< IoU_adj == 0
  std::size_t i1 = 0;  ///< IoU_adj > 0
  std::size_t dropped_empty_interior = 0;
};

/// Segment records of a corpus; image ids are scene indices.
std::vector<SegmentRecord> corpus_records(const std::vector<SyntheticScene>& scenes,
                                          const ImageMetricsOptions& options = {},
                                          CorpusSummary* summary = nullptr);

/// Writes <dir>/scene_NNNN.probs.mst and .labels.mst per scene plus
/// injected_false.csv (first line is `comment` when non-empty).
void save_corpus(const std::vector<SyntheticScene>& scenes, const std::filesystem::path& dir,
                 std::string_view comment = {});

}  // namespace metaseg
