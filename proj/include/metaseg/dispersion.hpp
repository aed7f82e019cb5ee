// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "metaseg/tensor.hpp"

namespace metaseg {

/// Per-pixel argmax; ties go to the lowest class index.
ClassMap predict_classes(const ProbTensor& probs);

/// Normalized Shannon entropy, -(1/log q) * sum f log f with 0 log 0 = 0.
HeatMap entropy_map(const ProbTensor& probs);

/// 1 - (largest probability) + (second largest probability).
HeatMap diff_map(const ProbTensor& probs);

}  // namespace metaseg
