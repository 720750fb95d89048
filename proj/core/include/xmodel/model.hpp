#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xmodel/rational.hpp"

namespace xmodel {

/// Fluid-scale parameters of an X-model instance: two classes, two pools.
/// Index convention: mu_ij is the service rate of a class-i customer by a
/// pool-j agent.
struct ModelParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu11 = 0.0;
  double mu12 = 0.0;
  double mu21 = 0.0;
  double mu22 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  Ratio r12{1, 1};
  Ratio r21{1, 1};
  double kappa12 = 0.0;
  double kappa21 = 0.0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// The configuration every test and acceptance check is calibrated on.
ModelParams canonical_params();

/// Throws Error(kInvalidParams) on non-positive rates or staffing, or r12 < r21.
void validate(const ModelParams& p);

/// Point (q1, q2, z12) of the fluid state space [0,inf)^2 x [0,m2].
struct FluidState {
  double q1 = 0.0;
  double q2 = 0.0;
  double z12 = 0.0;

  friend bool operator==(const FluidState&, const FluidState&) = default;
};

bool in_state_space(const FluidState& x, const ModelParams& p);
double l1_distance(const FluidState& a, const FluidState& b);

struct DerivedQuantities {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double qa1 = 0.0;  ///< stand-alone fluid queue of class 1
  double qa2 = 0.0;
  double sa1 = 0.0;  ///< stand-alone fluid idleness of pool 1
  double sa2 = 0.0;
};

DerivedQuantities derived_quantities(const ModelParams& p);

/// Names of the overload conditions that fail. Empty when class 1 is
/// overloaded even after help from pool 2 and more overloaded than class 2.
std::vector<std::string> validate_overload(const ModelParams& p);

/// Transition rates of the fast-time-scale process at a fluid state. The
/// "1" jumps move the difference by +-1, the "R" jumps by +-r12. "minus"
/// applies when the difference is <= 0, "plus" when it is > 0.
struct FtspRates {
  double lam1_minus = 0.0;
  double lamR_minus = 0.0;
  double mu1_minus = 0.0;
  double muR_minus = 0.0;
  double lam1_plus = 0.0;
  double lamR_plus = 0.0;
  double mu1_plus = 0.0;
  double muR_plus = 0.0;

  FtspRates scaled(double c) const;
};

FtspRates ftsp_rates(const FluidState& gamma, const ModelParams& p);

struct DriftPair {
  double minus = 0.0;  ///< drift while the difference is <= 0
  double plus = 0.0;   ///< drift while the difference is > 0
};

DriftPair drift_pair(const FtspRates& rates, Ratio r);
DriftPair drift_pair(const FluidState& gamma, const ModelParams& p);

enum class Region { kSPlus, kSMinus, kBoundaryA, kBoundaryAPlus, kBoundaryAMinus };

/// "S+", "S-", "A", "A+", "A-".
std::string_view to_string(Region region);

/// Classifies by the sign of q1 - r12*q2; |q1 - r12*q2| <= boundary_tol
/// counts as the switching surface, where the drift pair decides.
Region classify_region(const FluidState& gamma, const ModelParams& p, double boundary_tol = 0.0);

/// Unique fixed point x* of the fluid ODE. Throws Error(kOutsideRegime) if
/// z12* falls outside [0, m2].
FluidState stationary_point(const ModelParams& p);

/// Six-dimensional embedding (q1, q2, z11, z12, z21, z22) with both pools
/// full and no reverse sharing.
struct FluidState6 {
  double q1 = 0.0;
  double q2 = 0.0;
  double z11 = 0.0;
  double z12 = 0.0;
  double z21 = 0.0;
  double z22 = 0.0;
};

FluidState6 embed6(const FluidState& x, const ModelParams& p);

/// Threshold scale c_n = n^0.6.
double threshold_scale(std::int64_t n);

/// The n-th system of the many-server sequence, with integer rates,
/// staffing and thresholds.
struct ScaledInstance {
  std::int64_t n = 1;
  std::int64_t lambda1_n = 0;
  std::int64_t lambda2_n = 0;
  std::int64_t m1_n = 0;
  std::int64_t m2_n = 0;
  std::int64_t k12_n = 0;
  std::int64_t k21_n = 0;
  ModelParams params;
};

/// round-half-up of n*lambda_i and n*m_j; thresholds round(kappa*c_n)
/// lifted to the next multiple of the ratio denominator (and at least one
/// multiple). Throws Error(kInvalidParams) for n < 1 or zero staffing.
ScaledInstance scaled_instance(const ModelParams& p, std::int64_t n);

std::int64_t round_half_up(double x);

}  // namespace xmodel
