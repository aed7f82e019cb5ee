// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace metaseg {

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  /// 1 (gray) or 3 (RGB) 8-bit samples per pixel, row-major.
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;
};

/// Non-interlaced 8-bit PNG. `comment`, when non-empty, goes into a tEXt
/// chunk keyed "Comment".
std::vector<std::uint8_t> encode_png(const Image& image, std::string_view comment = {});

void write_png(const Image& image, const std::filesystem::path& path, std::string_view comment = {});

}  // namespace metaseg
