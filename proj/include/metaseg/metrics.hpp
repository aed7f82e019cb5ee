// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace metaseg {

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Fraction of correct decisions, predicting 1 when score >= threshold.
double accuracy(std::span<const double> scores, std::span<const double> labels,
                double threshold = 0.5);

/// Majority-class accuracy max(I0, I1) / (I0 + I1). The matching AUROC is 0.5.
double naive_baseline(std::span<const double> labels);
inline constexpr double kNaiveAuroc = 0.5;

/// Mann-Whitney AUROC with tied scores counted 1/2. Throws SingleClass.
double auroc(std::span<const double> scores, std::span<const double> labels);

/// 1 - SS_res / SS_tot. Throws ZeroVariance when the truth is constant.
double r_squared(std::span<const double> pred, std::span<const double> truth);
/// Population (1/n) standard deviation of pred - truth.
double residual_sigma(std::span<const double> pred, std::span<const double> truth);

/// Sample correlation coefficient. Throws ZeroVariance on a constant input.
double pearson(std::span<const double> a, std::span<const double> b);

/// 2TP / (2TP + FP + FN); 1 when both masks are empty.
double dice(std::span<const std::uint8_t> pred_mask, std::span<const std::uint8_t> gt_mask);

}  // namespace metaseg
