#include "xmodel/rational.hpp"

#include <charconv>
#include <numeric>

#include "xmodel/error.hpp"

namespace xmodel {

namespace {

std::int64_t parse_positive(std::string_view text, std::string_view whole) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw Error(ErrorCode::kInvalidParams, "cannot parse ratio '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) {
    throw Error(ErrorCode::kInvalidParams,
                "ratio must be a quotient of positive integers, got " + std::to_string(num) +
                    "/" + std::to_string(den));
  }
  const auto g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Ratio Ratio::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Ratio(parse_positive(text, text), 1);
  return Ratio(parse_positive(text.substr(0, slash), text),
               parse_positive(text.substr(slash + 1), text));
}

std::string Ratio::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace xmodel
