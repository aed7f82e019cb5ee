// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "metaseg/tensor.hpp"

// MST is a minimal little-endian container:
//   "MST1" | u8 dtype (1 = f32, 2 = i32) | u8 rank (2 or 3) | rank x u32 dims | payload
// The payload is row-major with the class axis innermost. No padding.

namespace metaseg {

enum class MstDtype : std::uint8_t { Float32 = 1, Int32 = 2 };

ProbTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const ProbTensor& tensor, const std::filesystem::path& path);

LabelMap load_label_map(const std::filesystem::path& path, std::size_t num_classes,
                        std::int32_t ignore = kDefaultIgnore);
void save_label_map(const LabelMap& labels, const std::filesystem::path& path);

}  // namespace metaseg
