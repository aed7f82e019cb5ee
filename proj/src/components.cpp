// SPDX-License-Identifier: Apache-2.0
#include "metaseg/components.hpp"

#include <algorithm>
#include <optional>
#include <span>

namespace metaseg {
namespace {

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

SegmentationDecomposition label(std::size_t height, std::size_t width,
                                std::span<const std::int32_t> classes,
                                std::optional<std::int32_t> ignore) {
  SegmentationDecomposition out;
  out.height = height;
  out.width = width;
  out.pixel_to_segment.assign(height * width, -1);

  std::vector<std::uint32_t> stack;
  for (std::size_t start = 0; start < classes.size(); ++start) {
    if (out.pixel_to_segment[start] >= 0) continue;
    const std::int32_t cls = classes[start];
    if (ignore && cls == *ignore) continue;

    Segment seg;
    seg.id = static_cast<std::int32_t>(out.segments.size());
    seg.cls = cls;
    out.pixel_to_segment[start] = seg.id;
    stack.assign(1, static_cast<std::uint32_t>(start));
    while (!stack.empty()) {
      const std::uint32_t z = stack.back();
      stack.pop_back();
      seg.pixels.push_back(z);
      const long r = z / width;
      const long c = z % width;
      for (int k = 0; k < 8; ++k) {
        const long nr = r + kDr[k];
        const long nc = c + kDc[k];
        if (nr < 0 || nc < 0 || nr >= static_cast<long>(height) || nc >= static_cast<long>(width)) {
          continue;
        }
        const std::size_t n = static_cast<std::size_t>(nr) * width + static_cast<std::size_t>(nc);
        if (out.pixel_to_segment[n] < 0 && classes[n] == cls) {
          out.pixel_to_segment[n] = seg.id;
          stack.push_back(static_cast<std::uint32_t>(n));
        }
      }
    }
    std::sort(seg.pixels.begin(), seg.pixels.end());
    out.segments.push_back(std::move(seg));
  }

  for (auto& seg : out.segments) {
    for (std::uint32_t z : seg.pixels) {
      const std::size_t r = z / width;
      const std::size_t c = z % width;
      bool inner = r > 0 && c > 0 && r + 1 < height && c + 1 < width;
      for (int k = 0; inner && k < 8; ++k) {
        const std::size_t n = (r + kDr[k]) * width + (c + kDc[k]);
        inner = out.pixel_to_segment[n] == seg.id;
      }
      (inner ? seg.interior : seg.boundary).push_back(z);
    }
  }
  return out;
}

}  // namespace

SegmentationDecomposition connected_components(const ClassMap& map) {
  return label(map.height, map.width, map.classes, std::nullopt);
}

SegmentationDecomposition connected_components(const LabelMap& map) {
  return label(map.height, map.width, map.labels, map.ignore);
}

Segment interior_boundary_split(Segment seg, std::size_t height, std::size_t width) {
  seg.interior.clear();
  seg.boundary.clear();
  if (seg.pixels.empty()) return seg;

  std::size_t r0 = height, r1 = 0, c0 = width, c1 = 0;
  for (std::uint32_t z : seg.pixels) {
    r0 = std::min<std::size_t>(r0, z / width);
    r1 = std::max<std::size_t>(r1, z / width);
    c0 = std::min<std::size_t>(c0, z % width);
    c1 = std::max<std::size_t>(c1, z % width);
  }
  const std::size_t bw = c1 - c0 + 1;
  std::vector<char> mask((r1 - r0 + 1) * bw, 0);
  for (std::uint32_t z : seg.pixels) mask[(z / width - r0) * bw + (z % width - c0)] = 1;

  for (std::uint32_t z : seg.pixels) {
    const std::size_t r = z / width;
    const std::size_t c = z % width;
    // Neighbours outside the bounding box are outside the segment.
    bool inner = r > r0 && c > c0 && r < r1 && c < c1;
    for (int k = 0; inner && k < 8; ++k) {
      inner = mask[(r + kDr[k] - r0) * bw + (c + kDc[k] - c0)] != 0;
    }
    (inner ? seg.interior : seg.boundary).push_back(z);
  }
  return seg;
}

}  // namespace metaseg
