#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "xmodel/model.hpp"

namespace xmodel::detail {

[[noreturn]] void config_error(std::string_view context, const std::string& message);

double number_at(const toml::table& table, std::string_view key, std::string_view context);
std::int64_t integer_at(const toml::table& table, std::string_view key, std::string_view context);
std::string string_at(const toml::table& table, std::string_view key, std::string_view context);
std::vector<double> number_array_at(const toml::table& table, std::string_view key,
                                    std::string_view context);

/// Throws naming the first key of `table` that is not in `allowed`.
void reject_unknown_keys(const toml::table& table, const std::vector<std::string_view>& allowed,
                         std::string_view context);

ModelParams params_from_table(const toml::table& table, std::string_view context);

std::string shortest_double(double value);

}  // namespace xmodel::detail
