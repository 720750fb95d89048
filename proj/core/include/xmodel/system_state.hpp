#pragma once

#include <cstdint>

namespace xmodel {

/// Integer state (Q1, Q2, Z11, Z12, Z21, Z22) of the n-th CTMC. Zij counts
/// class-i customers served by pool-j agents.
struct SystemState {
  std::int64_t q1 = 0;
  std::int64_t q2 = 0;
  std::int64_t z11 = 0;
  std::int64_t z12 = 0;
  std::int64_t z21 = 0;
  std::int64_t z22 = 0;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

}  // namespace xmodel
