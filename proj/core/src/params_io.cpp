#include "xmodel/params_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "toml_util.hpp"
#include "xmodel/error.hpp"

namespace xmodel {

namespace detail {

void config_error(std::string_view context, const std::string& message) {
  throw Error(ErrorCode::kConfigParse, std::string(context) + ": " + message);
}

double number_at(const toml::table& table, std::string_view key, std::string_view context) {
  const auto* node = table.get(key);
  if (node == nullptr) config_error(context, "missing key '" + std::string(key) + "'");
  if (auto v = node->value_exact<double>()) return *v;
  if (auto v = node->value_exact<std::int64_t>()) return static_cast<double>(*v);
  config_error(context, "key '" + std::string(key) + "' must be a number");
}

std::int64_t integer_at(const toml::table& table, std::string_view key, std::string_view context) {
  const auto* node = table.get(key);
  if (node == nullptr) config_error(context, "missing key '" + std::string(key) + "'");
  if (auto v = node->value_exact<std::int64_t>()) return *v;
  config_error(context, "key '" + std::string(key) + "' must be an integer");
}

std::string string_at(const toml::table& table, std::string_view key, std::string_view context) {
  const auto* node = table.get(key);
  if (node == nullptr) config_error(context, "missing key '" + std::string(key) + "'");
  if (auto v = node->value_exact<std::string>()) return *v;
  config_error(context, "key '" + std::string(key) + "' must be a string");
}

std::vector<double> number_array_at(const toml::table& table, std::string_view key,
                                    std::string_view context) {
  const auto* node = table.get(key);
  if (node == nullptr) config_error(context, "missing key '" + std::string(key) + "'");
  const auto* array = node->as_array();
  if (array == nullptr) config_error(context, "key '" + std::string(key) + "' must be an array");
  std::vector<double> out;
  for (const auto& element : *array) {
    if (auto v = element.value_exact<double>()) {
      out.push_back(*v);
    } else if (auto i = element.value_exact<std::int64_t>()) {
      out.push_back(static_cast<double>(*i));
    } else {
      config_error(context, "array '" + std::string(key) + "' must hold numbers");
    }
  }
  return out;
}

void reject_unknown_keys(const toml::table& table, const std::vector<std::string_view>& allowed,
                         std::string_view context) {
  for (const auto& [key, value] : table) {
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
      config_error(context, "unknown key '" + std::string(key.str()) + "'");
    }
  }
}

namespace {

Ratio ratio_at(const toml::table& table, std::string_view key, std::string_view context) {
  const auto* node = table.get(key);
  if (node == nullptr) config_error(context, "missing key '" + std::string(key) + "'");
  try {
    if (auto s = node->value_exact<std::string>()) return Ratio::parse(*s);
    if (auto i = node->value_exact<std::int64_t>()) return Ratio(*i, 1);
  } catch (const Error& e) {
    config_error(context, "key '" + std::string(key) + "': " + e.detail());
  }
  config_error(context, "key '" + std::string(key) + "' must be a ratio string \"j/k\"");
}

}  // namespace

ModelParams params_from_table(const toml::table& table, std::string_view context) {
  reject_unknown_keys(table,
                      {"lambda1", "lambda2", "mu11", "mu12", "mu21", "mu22", "theta1", "theta2",
                       "m1", "m2", "r12", "r21", "kappa12", "kappa21"},
                      context);
  ModelParams p;
  p.lambda1 = number_at(table, "lambda1", context);
  p.lambda2 = number_at(table, "lambda2", context);
  p.mu11 = number_at(table, "mu11", context);
  p.mu12 = number_at(table, "mu12", context);
  p.mu21 = number_at(table, "mu21", context);
  p.mu22 = number_at(table, "mu22", context);
  p.theta1 = number_at(table, "theta1", context);
  p.theta2 = number_at(table, "theta2", context);
  p.m1 = number_at(table, "m1", context);
  p.m2 = number_at(table, "m2", context);
  p.r12 = ratio_at(table, "r12", context);
  p.r21 = ratio_at(table, "r21", context);
  p.kappa12 = number_at(table, "kappa12", context);
  p.kappa21 = number_at(table, "kappa21", context);
  try {
    validate(p);
  } catch (const Error& e) {
    config_error(context, e.detail());
  }
  return p;
}

std::string shortest_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  std::string out(buf.data(), ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

}  // namespace detail

ModelParams params_from_toml(std::string_view text) {
  try {
    const auto table = toml::parse(text);
    return detail::params_from_table(table, "params");
  } catch (const toml::parse_error& e) {
    detail::config_error("params", std::string(e.description()));
  }
}

ModelParams params_from_toml_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return params_from_toml(buffer.str());
}

std::string params_to_toml(const ModelParams& p) {
  using detail::shortest_double;
  std::ostringstream out;
  out << "lambda1 = " << shortest_double(p.lambda1) << "\n"
      << "lambda2 = " << shortest_double(p.lambda2) << "\n"
      << "mu11 = " << shortest_double(p.mu11) << "\n"
      << "mu12 = " << shortest_double(p.mu12) << "\n"
      << "mu21 = " << shortest_double(p.mu21) << "\n"
      << "mu22 = " << shortest_double(p.mu22) << "\n"
      << "theta1 = " << shortest_double(p.theta1) << "\n"
      << "theta2 = " << shortest_double(p.theta2) << "\n"
      << "m1 = " << shortest_double(p.m1) << "\n"
      << "m2 = " << shortest_double(p.m2) << "\n"
      << "r12 = \"" << p.r12.to_string() << "\"\n"
      << "r21 = \"" << p.r21.to_string() << "\"\n"
      << "kappa12 = " << shortest_double(p.kappa12) << "\n"
      << "kappa21 = " << shortest_double(p.kappa21) << "\n";
  return out.str();
}

}  // namespace xmodel
