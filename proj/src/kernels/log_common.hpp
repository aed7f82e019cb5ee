// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

// Constants shared by the scalar and AVX2 kernels. Both evaluate
//   log(x) = e*ln2 + 2*atanh(s),  s = (m - 1) / (m + 1),  m in [sqrt(1/2), sqrt(2))
// with the same Horner order, so the two paths round identically.

namespace metaseg::kernels::detail {

inline constexpr double kLn2 = 0.6931471805599453094;
inline constexpr double kSqrtHalf = 0.70710678118654752440;
inline constexpr std::uint64_t kMantissaMask = 0x000fffffffffffffULL;
inline constexpr std::uint64_t kHalfExponent = 0x3fe0000000000000ULL;
inline constexpr std::uint64_t kTwo52Bits = 0x4330000000000000ULL;
inline constexpr double kTwo52 = 4503599627370496.0;
inline constexpr double kExponentBias = 1022.0;

// atanh series coefficients 1/(2k+1), k = 0..9, highest first.
inline constexpr double kAtanhCoeffs[10] = {
    1.0 / 19.0, 1.0 / 17.0, 1.0 / 15.0, 1.0 / 13.0, 1.0 / 11.0,
    1.0 / 9.0,  1.0 / 7.0,  1.0 / 5.0,  1.0 / 3.0,  1.0,
};

// Probabilities below this are clamped before the log; f*log(f) -> 0 anyway.
inline constexpr double kLogFloor = 1e-12;

// Branch-free forms matching MAXPD/MINPD exactly (second operand on ties).
inline double vmax(double a, double b) { return a > b ? a : b; }
inline double vmin(double a, double b) { return a < b ? a : b; }

}  // namespace metaseg::kernels::detail
