// SPDX-License-Identifier: Apache-2.0
#include "metaseg/dispersion.hpp"

#include "metaseg/kernels.hpp"

namespace metaseg {

ClassMap predict_classes(const ProbTensor& probs) {
  ClassMap map{probs.height(), probs.width(), std::vector<std::int32_t>(probs.num_pixels())};
  for (std::size_t z = 0; z < probs.num_pixels(); ++z) {
    const auto f = probs.pixel(z);
    std::size_t best = 0;
    for (std::size_t c = 1; c < f.size(); ++c) {
      if (f[c] > f[best]) best = c;
    }
    map.classes[z] = static_cast<std::int32_t>(best);
  }
  return map;
}

HeatMap entropy_map(const ProbTensor& probs) {
  HeatMap map{probs.height(), probs.width(), std::vector<double>(probs.num_pixels()),
              HeatKind::Entropy};
  kernels::normalized_entropy(probs.values(), probs.num_classes(), map.values);
  return map;
}

HeatMap diff_map(const ProbTensor& probs) {
  HeatMap map{probs.height(), probs.width(), std::vector<double>(probs.num_pixels()),
              HeatKind::Diff};
  kernels::top2_difference(probs.values(), probs.num_classes(), map.values);
  return map;
}

}  // namespace metaseg
