// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 (no FMA). Only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "log_common.hpp"
#include "metaseg/kernels.hpp"

namespace metaseg::kernels::avx2 {
namespace {

using namespace detail;

inline __m256d log_positive4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i two52 = _mm256_set1_epi64x(static_cast<long long>(kTwo52Bits));
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 52), two52)),
      _mm256_set1_pd(kTwo52));
  e = _mm256_sub_pd(e, _mm256_set1_pd(kExponentBias));

  const __m256i mant = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(kMantissaMask))),
      _mm256_set1_epi64x(static_cast<long long>(kHalfExponent)));
  __m256d m = _mm256_castsi256_pd(mant);
  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrtHalf), _CMP_LT_OQ);
  m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), small);
  e = _mm256_blendv_pd(e, _mm256_sub_pd(e, _mm256_set1_pd(1.0)), small);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d r = _mm256_set1_pd(kAtanhCoeffs[0]);
  for (int k = 1; k < 10; ++k) {
    r = _mm256_add_pd(_mm256_mul_pd(r, z), _mm256_set1_pd(kAtanhCoeffs[k]));
  }
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2)),
                       _mm256_mul_pd(_mm256_add_pd(s, s), r));
}

inline __m256d clamp01(__m256d v) {
  return _mm256_min_pd(_mm256_max_pd(v, _mm256_setzero_pd()), _mm256_set1_pd(1.0));
}

inline __m256d gather_class(const float* base, __m128i stride_index) {
  return _mm256_cvtps_pd(_mm_i32gather_ps(base, stride_index, 4));
}

inline double hsum(__m256d acc) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

void normalized_entropy(std::span<const float> probs, std::size_t num_classes,
                        std::span<double> out) {
  const double inv_log_q = 1.0 / std::log(static_cast<double>(num_classes));
  const int q = static_cast<int>(num_classes);
  const __m128i index = _mm_setr_epi32(0, q, 2 * q, 3 * q);
  const __m256d floor = _mm256_set1_pd(kLogFloor);
  const __m256d inv = _mm256_set1_pd(inv_log_q);
  const __m256d sign = _mm256_set1_pd(-0.0);

  const std::size_t n = out.size();
  std::size_t z = 0;
  for (; z + 4 <= n; z += 4) {
    const float* base = probs.data() + z * num_classes;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t c = 0; c < num_classes; ++c) {
      const __m256d v = gather_class(base + c, index);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(v, log_positive4(_mm256_max_pd(v, floor))));
    }
    const __m256d e = _mm256_xor_pd(_mm256_mul_pd(acc, inv), sign);
    _mm256_storeu_pd(out.data() + z, clamp01(e));
  }
  if (z < n) {
    scalar::normalized_entropy(probs.subspan(z * num_classes), num_classes, out.subspan(z));
  }
}

void top2_difference(std::span<const float> probs, std::size_t num_classes,
                     std::span<double> out) {
  const int q = static_cast<int>(num_classes);
  const __m128i index = _mm_setr_epi32(0, q, 2 * q, 3 * q);
  const __m256d one = _mm256_set1_pd(1.0);

  const std::size_t n = out.size();
  std::size_t z = 0;
  for (; z + 4 <= n; z += 4) {
    const float* base = probs.data() + z * num_classes;
    __m256d top = gather_class(base, index);
    __m256d second = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < num_classes; ++c) {
      const __m256d v = gather_class(base + c, index);
      second = _mm256_max_pd(second, _mm256_min_pd(top, v));
      top = _mm256_max_pd(top, v);
    }
    const __m256d d = _mm256_add_pd(_mm256_sub_pd(one, top), second);
    _mm256_storeu_pd(out.data() + z, clamp01(d));
  }
  if (z < n) {
    scalar::top2_difference(probs.subspan(z * num_classes), num_classes, out.subspan(z));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                                           _mm256_loadu_pd(b.data() + i)));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(ab, _mm256_loadu_pd(w.data() + i)));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total = total + (a[i] * b[i]) * w[i];
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace metaseg::kernels::avx2
