// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops used by the dispersion maps and the coordinate
// descent solver. Every routine has a scalar reference and, on x86-64, an
// AVX2 variant selected at runtime. The scalar versions mirror the vector
// lane structure (four partial sums, identical operation order, no FMA), so
// both backends return bit-identical results. That keeps every output file
// byte-identical regardless of which CPU produced it.

namespace metaseg::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);
bool backend_available(Backend backend);

/// Backend used by the dispatching entry points below. Defaults to the best
/// available one; the METASEG_KERNELS environment variable ("scalar" or
/// "avx2") overrides the default.
Backend active_backend();
void set_backend(Backend backend);

/// Natural log for positive normal doubles, accurate to a few ulp. This is
/// the log both backends share; it is not a drop-in for std::log on
/// subnormals, zero or negative input.
double log_positive(double x);

// `probs` holds `out.size()` pixels of `num_classes` float32 values each.
void normalized_entropy(std::span<const float> probs, std::size_t num_classes,
                        std::span<double> out);
void top2_difference(std::span<const float> probs, std::size_t num_classes,
                     std::span<double> out);

double dot(std::span<const double> a, std::span<const double> b);
/// sum_i a_i * b_i * w_i
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
void normalized_entropy(std::span<const float> probs, std::size_t num_classes,
                        std::span<double> out);
void top2_difference(std::span<const float> probs, std::size_t num_classes,
                     std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace scalar

namespace avx2 {
void normalized_entropy(std::span<const float> probs, std::size_t num_classes,
                        std::span<double> out);
void top2_difference(std::span<const float> probs, std::size_t num_classes,
                     std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace avx2

}  // namespace metaseg::kernels
