// SPDX-License-Identifier: Apache-2.0
#include "metaseg/render.hpp"

#include <algorithm>
#include <cmath>

#include "metaseg/error.hpp"

namespace metaseg {
namespace {

std::uint8_t round_half_up(double x) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(x + 0.5), 0.0, 255.0));
}

}  // namespace

Image render_heatmap(const HeatMap& map) {
  if (map.values.size() != map.height * map.width) {
    throw Error(ErrorKind::DimensionMismatch, "heat map size does not match its shape");
  }
  Image img{map.width, map.height, 1, std::vector<std::uint8_t>(map.values.size())};
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const double v = std::clamp(map.values[i], 0.0, 1.0);
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - v)));
  }
  return img;
}

Rgb iou_color(double value) {
  const double v = std::clamp(value, 0.0, 1.0);
  return {round_half_up(255.0 * (1.0 - v)), round_half_up(255.0 * v), 0};
}

Image render_iou_overlay(const SegmentationDecomposition& pred, const std::vector<double>& values,
                         const LabelMap& gt) {
  const std::size_t n = pred.height * pred.width;
  if (gt.height != pred.height || gt.width != pred.width || gt.labels.size() != n ||
      pred.pixel_to_segment.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "overlay inputs differ in shape");
  }
  if (values.size() != pred.segments.size()) {
    throw Error(ErrorKind::DimensionMismatch, "need one value per predicted segment");
  }
  Image img{pred.width, pred.height, 3, std::vector<std::uint8_t>(n * 3)};
  for (std::size_t i = 0; i < n; ++i) {
    Rgb color = kNoGroundTruthColor;
    if (!gt.is_ignored(i)) {
      const double v = values[static_cast<std::size_t>(pred.pixel_to_segment[i])];
      color = std::isnan(v) ? kNoValueColor : iou_color(v);
    }
    std::copy(color.begin(), color.end(), img.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return img;
}

}  // namespace metaseg
