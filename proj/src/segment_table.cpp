// SPDX-License-Identifier: Apache-2.0
#include "metaseg/segment_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "metaseg/error.hpp"

namespace metaseg {
namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out += buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::MalformedHeader,
                "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

void SegmentTable::sort() {
  std::sort(rows.begin(), rows.end(), [](const SegmentRecord& a, const SegmentRecord& b) {
    return a.image_id != b.image_id ? a.image_id < b.image_id : a.segment_id < b.segment_id;
  });
}

void SegmentTable::validate() const {
  std::vector<std::pair<std::int64_t, std::int32_t>> keys;
  keys.reserve(rows.size());
  for (const auto& r : rows) {
    const std::string where =
        "row (" + std::to_string(r.image_id) + "," + std::to_string(r.segment_id) + ")";
    if (r.mean_probs.size() != num_classes) {
      throw Error(ErrorKind::DimensionMismatch, where + " has wrong probability vector length");
    }
    if (r.metrics[1] < 1.0) throw Error(ErrorKind::EmptyInterior, where + " has S_in < 1");
    if (!(r.iou >= 0.0 && r.iou <= r.iou_adj && r.iou_adj <= 1.0 && r.ios >= 0.0 && r.ios <= 1.0)) {
      throw Error(ErrorKind::NotAProbability, where + " violates 0 <= iou <= iou_adj <= 1");
    }
    double psum = 0.0;
    for (double p : r.mean_probs) psum += p;
    if (std::abs(psum - 1.0) > kSimplexTolerance) {
      throw Error(ErrorKind::NotAProbability, where + " mean probabilities do not sum to 1");
    }
    keys.emplace_back(r.image_id, r.segment_id);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw Error(ErrorKind::DimensionMismatch, "duplicate (image_id, segment_id) key");
  }
}

std::string segment_table_header(std::size_t num_classes) {
  std::string h = "image_id,segment_id,class";
  for (auto name : kMetricNames) {
    h += ',';
    h += name;
  }
  for (std::size_t j = 0; j < num_classes; ++j) h += ",P_" + std::to_string(j);
  h += ",iou,iou_adj,ios";
  return h;
}

std::string format_segment_table(const SegmentTable& table, std::string_view comment) {
  SegmentTable sorted = table;
  sorted.sort();
  std::string out;
  if (!comment.empty()) {
    out += "# ";
    out += comment;
    out += '\n';
  }
  out += segment_table_header(table.num_classes);
  out += '\n';
  for (const auto& r : sorted.rows) {
    out += std::to_string(r.image_id) + ',' + std::to_string(r.segment_id) + ',' +
           std::to_string(r.cls);
    for (double v : r.metrics) {
      out += ',';
      append_double(out, v);
    }
    for (double v : r.mean_probs) {
      out += ',';
      append_double(out, v);
    }
    for (double v : {r.iou, r.iou_adj, r.ios}) {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_segment_table(const SegmentTable& table, const std::filesystem::path& path,
                         std::string_view comment) {
  const std::string text = format_segment_table(table, comment);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoFailure, "short write to " + path.string());
}

SegmentTable read_segment_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());

  SegmentTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t ncols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (!have_header) {
      const std::size_t fixed = 3 + kNumSegmentMetrics + 3;
      if (cells.size() < fixed) {
        throw Error(ErrorKind::MalformedHeader, path.string() + ": header too short");
      }
      table.num_classes = cells.size() - fixed;
      if (line != segment_table_header(table.num_classes)) {
        throw Error(ErrorKind::MalformedHeader, path.string() + ": header does not match schema");
      }
      ncols = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != ncols) {
      throw Error(ErrorKind::DimensionMismatch,
                  path.string() + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " + std::to_string(ncols));
    }
    SegmentRecord r;
    r.image_id = static_cast<std::int64_t>(parse_double(cells[0], line_no));
    r.segment_id = static_cast<std::int32_t>(parse_double(cells[1], line_no));
    r.cls = static_cast<std::int32_t>(parse_double(cells[2], line_no));
    std::size_t c = 3;
    for (double& v : r.metrics) v = parse_double(cells[c++], line_no);
    r.mean_probs.resize(table.num_classes);
    for (double& v : r.mean_probs) v = parse_double(cells[c++], line_no);
    r.iou = parse_double(cells[c++], line_no);
    r.iou_adj = parse_double(cells[c++], line_no);
    r.ios = parse_double(cells[c++], line_no);
    table.rows.push_back(std::move(r));
  }
  if (!have_header) throw Error(ErrorKind::MalformedHeader, path.string() + ": missing header");
  table.validate();
  return table;
}

}  // namespace metaseg
