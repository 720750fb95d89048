#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace xmodel {

/// Positive rational j/k kept in lowest terms. Queue-ratio parameters are
/// stored this way so the lattice of the queue-difference process is exact.
class Ratio {
 public:
  Ratio() = default;
  /// Throws Error(kInvalidParams) unless num > 0 and den > 0.
  Ratio(std::int64_t num, std::int64_t den);

  /// Accepts "j/k" or a bare positive integer "j".
  static Ratio parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string to_string() const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
  /// Exact comparison by cross-multiplication.
  friend bool operator<(const Ratio& a, const Ratio& b) noexcept {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator>=(const Ratio& a, const Ratio& b) noexcept { return !(a < b); }

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

}  // namespace xmodel
