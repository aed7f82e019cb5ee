// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "metaseg/regression.hpp"

namespace metaseg {

/// Flat JSON text: kind, lambda, intercept, means, stds, weights. Doubles are
/// printed with 17 significant digits, so parse(format(m)) == m exactly.
std::string format_model(const MetaModel& model, std::string_view comment = {});
MetaModel parse_model(std::string_view text);

void save_model(const MetaModel& model, const std::filesystem::path& path,
                std::string_view comment = {});
MetaModel load_model(const std::filesystem::path& path);

}  // namespace metaseg
