// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "metaseg/seg_metrics.hpp"

namespace metaseg {

/// Rows of per-segment metrics. The CSV schema is
///   image_id,segment_id,class,<15 metrics>,P_0..P_{q-1},iou,iou_adj,ios
/// with floats printed at 9 significant digits.
struct SegmentTable {
  std::size_t num_classes = 0;
  std::vector<SegmentRecord> rows;

  /// Sorts rows by (image_id, segment_id).
  void sort();
  /// Throws on duplicate keys, inconsistent q or violated record invariants.
  void validate() const;
};

std::string segment_table_header(std::size_t num_classes);

/// `comment`, when non-empty, is written as a leading "# " line.
void write_segment_table(const SegmentTable& table, const std::filesystem::path& path,
                         std::string_view comment = {});
std::string format_segment_table(const SegmentTable& table, std::string_view comment = {});

/// Lines starting with '#' are skipped.
SegmentTable read_segment_table(const std::filesystem::path& path);

}  // namespace metaseg
