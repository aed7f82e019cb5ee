// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "metaseg/tensor.hpp"

namespace metaseg {

/// One maximal 8-connected set of same-class pixels. Pixel lists hold
/// row-major linear indices in ascending order. A pixel is interior when all
/// eight neighbours exist in the image and belong to the segment.
struct Segment {
  std::int32_t id = 0;
  std::int32_t cls = 0;
  std::vector<std::uint32_t> pixels;
  std::vector<std::uint32_t> interior;
  std::vector<std::uint32_t> boundary;

  std::size_t size() const noexcept { return pixels.size(); }
  bool has_interior() const noexcept { return !interior.empty(); }
};

struct SegmentationDecomposition {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Segment> segments;
  /// Segment id per pixel, -1 for ignored ground-truth pixels.
  std::vector<std::int32_t> pixel_to_segment;
};

/// Segment ids are assigned 0..n-1 in row-major first-encounter order.
SegmentationDecomposition connected_components(const ClassMap& map);
/// Ignored pixels belong to no segment.
SegmentationDecomposition connected_components(const LabelMap& map);

/// Recomputes interior/boundary from `seg.pixels` alone; image-border pixels
/// are always boundary.
Segment interior_boundary_split(Segment seg, std::size_t height, std::size_t width);

}  // namespace metaseg
