// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "log_common.hpp"
#include "metaseg/kernels.hpp"

namespace metaseg::kernels {

using namespace detail;

double log_positive(double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  double e = std::bit_cast<double>((bits >> 52) | kTwo52Bits) - kTwo52;
  e = e - kExponentBias;
  double m = std::bit_cast<double>((bits & kMantissaMask) | kHalfExponent);
  if (m < kSqrtHalf) {
    m = m + m;
    e = e - 1.0;
  }
  const double s = (m - 1.0) / (m + 1.0);
  const double z = s * s;
  double r = kAtanhCoeffs[0];
  for (int k = 1; k < 10; ++k) r = r * z + kAtanhCoeffs[k];
  return e * kLn2 + (s + s) * r;
}

namespace scalar {

void normalized_entropy(std::span<const float> probs, std::size_t num_classes,
                        std::span<double> out) {
  const double inv_log_q = 1.0 / std::log(static_cast<double>(num_classes));
  for (std::size_t z = 0; z < out.size(); ++z) {
    const float* f = probs.data() + z * num_classes;
    double acc = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double v = f[c];
      acc = acc + v * log_positive(vmax(v, kLogFloor));
    }
    const double e = -(acc * inv_log_q);
    out[z] = vmin(vmax(e, 0.0), 1.0);
  }
}

void top2_difference(std::span<const float> probs, std::size_t num_classes,
                     std::span<double> out) {
  for (std::size_t z = 0; z < out.size(); ++z) {
    const float* f = probs.data() + z * num_classes;
    double top = f[0];
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 1; c < num_classes; ++c) {
      const double v = f[c];
      second = vmax(second, vmin(top, v));
      top = vmax(top, v);
    }
    const double d = (1.0 - top) + second;
    out[z] = vmin(vmax(d, 0.0), 1.0);
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] = acc[l] + a[i + l] * b[i + l];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
  const std::size_t n = a.size();
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] = acc[l] + (a[i + l] * b[i + l]) * w[i + l];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total = total + (a[i] * b[i]) * w[i];
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace scalar
}  // namespace metaseg::kernels
