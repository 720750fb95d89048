#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "xmodel/model.hpp"

namespace xmodel {

/// Parses a flat TOML table whose keys are exactly the ModelParams field
/// names. Ratios are written as strings "j/k" (a bare integer is also
/// accepted). Unknown or missing keys throw Error(kConfigParse).
ModelParams params_from_toml(std::string_view text);
ModelParams params_from_toml_file(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering of every field.
std::string params_to_toml(const ModelParams& p);

}  // namespace xmodel
