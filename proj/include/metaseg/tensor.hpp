// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace metaseg {

inline constexpr std::int32_t kDefaultIgnore = 255;
inline constexpr double kSimplexTolerance = 1e-4;

/// Per-image softmax field, row-major with the class axis innermost.
/// Values are stored as float32, matching what segmentation networks emit.
class ProbTensor {
 public:
  ProbTensor() = default;
  ProbTensor(std::size_t height, std::size_t width, std::size_t num_classes);
  ProbTensor(std::size_t height, std::size_t width, std::size_t num_classes,
             std::vector<float> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t num_classes() const noexcept { return classes_; }
  std::size_t num_pixels() const noexcept { return height_ * width_; }

  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }

  std::span<const float> pixel(std::size_t index) const noexcept {
    return {values_.data() + index * classes_, classes_};
  }
  std::span<float> pixel(std::size_t index) noexcept {
    return {values_.data() + index * classes_, classes_};
  }
  float at(std::size_t row, std::size_t col, std::size_t cls) const noexcept {
    return values_[(row * width_ + col) * classes_ + cls];
  }

  /// Throws DimensionMismatch / NotAProbability when the shape or simplex
  /// invariants are violated (including NaN or Inf entries).
  void validate(double tolerance = kSimplexTolerance) const;

  bool operator==(const ProbTensor&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t classes_ = 0;
  std::vector<float> values_;
};

/// Ground-truth labels; `ignore` marks pixels without annotation.
struct LabelMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int32_t> labels;
  std::int32_t ignore = kDefaultIgnore;

  bool is_ignored(std::size_t index) const noexcept { return labels[index] == ignore; }
  void validate(std::size_t num_classes) const;

  bool operator==(const LabelMap&) const = default;
};

/// Per-pixel argmax of a ProbTensor.
struct ClassMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int32_t> classes;

  bool operator==(const ClassMap&) const = default;
};

enum class HeatKind { Entropy, Diff };

struct HeatMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;
  HeatKind kind = HeatKind::Entropy;
};

}  // namespace metaseg
