#pragma once

// Reference computations used by the tests. They are written from the model
// definitions directly and share no code with the library's solvers.

#include <cstdint>
#include <map>

#include "xmodel/model.hpp"
#include "xmodel/system_state.hpp"

namespace oracle {

struct Rates {
  double lam1_minus, lamR_minus, mu1_minus, muR_minus;
  double lam1_plus, lamR_plus, mu1_plus, muR_plus;
};

/// Jump rates of the queue difference at a fluid state, from the model text.
Rates hand_rates(const xmodel::FluidState& g, const xmodel::ModelParams& p);

/// Drifts of the difference on each side.
double hand_delta_minus(const Rates& r, double ratio);
double hand_delta_plus(const Rates& r, double ratio);

/// Stationary law of the difference times k on the values [-bound, bound],
/// transitions leaving the window suppressed. Dense LU solve.
std::map<std::int64_t, double> truncated_stationary(const Rates& r, std::int64_t j, std::int64_t k,
                                                    std::int64_t bound);

double mass_positive(const std::map<std::int64_t, double>& law);

/// Pool-2 balance at the fixed point: mu12 z12 / (mu12 z12 + mu22 (m2 - z12)).
double balance_pi(const xmodel::FluidState& x, const xmodel::ModelParams& p);

struct FrozenDrifts {
  double minus, plus;
};

/// Drifts of the frozen difference of system n at an integer state, from the
/// unscaled rates (both pools full).
FrozenDrifts frozen_drifts(const xmodel::ScaledInstance& inst, const xmodel::SystemState& s);

}  // namespace oracle
