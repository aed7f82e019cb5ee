// SPDX-License-Identifier: Apache-2.0
#include "metaseg/tensor.hpp"

#include <cmath>
#include <string>

#include "metaseg/error.hpp"

namespace metaseg {

ProbTensor::ProbTensor(std::size_t height, std::size_t width, std::size_t num_classes)
    : height_(height), width_(width), classes_(num_classes),
      values_(height * width * num_classes, 0.0f) {}

ProbTensor::ProbTensor(std::size_t height, std::size_t width, std::size_t num_classes,
                       std::vector<float> values)
    : height_(height), width_(width), classes_(num_classes), values_(std::move(values)) {
  if (values_.size() != height * width * num_classes) {
    throw Error(ErrorKind::DimensionMismatch,
                "payload has " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(height * width * num_classes));
  }
}

void ProbTensor::validate(double tolerance) const {
  if (height_ < 1 || width_ < 1 || classes_ < 2) {
    throw Error(ErrorKind::DimensionMismatch, "tensor needs H >= 1, W >= 1, q >= 2");
  }
  if (values_.size() != height_ * width_ * classes_) {
    throw Error(ErrorKind::DimensionMismatch, "payload size does not match dimensions");
  }
  for (std::size_t z = 0; z < num_pixels(); ++z) {
    double sum = 0.0;
    for (float v : pixel(z)) {
      if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
        throw Error(ErrorKind::NotAProbability,
                    "pixel " + std::to_string(z) + " has entry outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw Error(ErrorKind::NotAProbability,
                  "pixel " + std::to_string(z) + " sums to " + std::to_string(sum));
    }
  }
}

void LabelMap::validate(std::size_t num_classes) const {
  if (labels.size() != height * width) {
    throw Error(ErrorKind::DimensionMismatch, "label payload size does not match dimensions");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::int32_t l = labels[i];
    if (l == ignore) continue;
    if (l < 0 || static_cast<std::size_t>(l) >= num_classes) {
      throw Error(ErrorKind::LabelOutOfRange,
                  "label " + std::to_string(l) + " at pixel " + std::to_string(i) +
                      " not in [0," + std::to_string(num_classes) + ")");
    }
  }
}

}  // namespace metaseg
