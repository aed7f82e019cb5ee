// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "metaseg/components.hpp"
#include "metaseg/png.hpp"
#include "metaseg/tensor.hpp"

namespace metaseg {

/// Grayscale with value round(255 * (1 - v)): high dispersion is dark.
Image render_heatmap(const HeatMap& map);

using Rgb = std::array<std::uint8_t, 3>;

/// Linear red (v = 0) to green (v = 1) ramp, rounding halves up.
Rgb iou_color(double value);

inline constexpr Rgb kNoGroundTruthColor = {255, 255, 255};
/// Segments without a value (e.g. dropped for lacking an interior).
inline constexpr Rgb kNoValueColor = {160, 160, 160};

/// Fills each predicted segment with iou_color(values[id]); NaN values use
/// kNoValueColor and pixels whose ground truth is ignored are white.
Image render_iou_overlay(const SegmentationDecomposition& pred, const std::vector<double>& values,
                         const LabelMap& gt);

}  // namespace metaseg
