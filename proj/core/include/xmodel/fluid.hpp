#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "xmodel/ftsp.hpp"
#include "xmodel/model.hpp"
#include "xmodel/qbd.hpp"

namespace xmodel {

struct FluidVelocity {
  double dq1 = 0.0;
  double dq2 = 0.0;
  double dz12 = 0.0;
};

/// Right-hand side of the fluid ODE for a given pi = pi_12(gamma).
FluidVelocity ode_rhs(const FluidState& gamma, const ModelParams& p, double pi);
/// Same, with pi computed by pi_12.
FluidVelocity ode_rhs(const FluidState& gamma, const ModelParams& p, const PiOptions& options = {});

/// Fluid states on the grid t0 + i*h.
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<FluidState> states;
  std::vector<double> pi_values;

  std::size_t size() const noexcept { return states.size(); }
  double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * h; }
  double end_time() const noexcept { return states.empty() ? t0 : time(states.size() - 1); }
  /// Linear interpolation between grid points, clamped to the grid range.
  FluidState state_at(double t) const;
  void write_csv(std::ostream& out) const;
};

struct IntegrateOptions {
  /// Rate-matrix solver for pi on A. Each step warm-starts from the
  /// previous R; logarithmic reduction is the fallback.
  SolveOptions solver{RateAlgorithm::kFunctionalIteration, 1e-13, 100'000, std::nullopt};
  /// |q1 - r12*q2| at or below this counts as the switching surface.
  double boundary_tol = 1e-9;
};

/// Forward Euler on [0, T] with step h. On S+ and S- pi is 1 and 0; a step
/// that would cross the switching surface is cut at the crossing and
/// continued from there. On A the state slides along q1 = r12*q2.
/// Every step is projected onto the state space. Throws
/// Error(kStepTooLarge) if a raw step leaves the state space by more than
/// h times the total-rate bound.
Trajectory integrate(const FluidState& x0, const ModelParams& p, double T, double h,
                     const IntegrateOptions& options = {});

/// First grid time with ||state - target||_1 <= eps.
std::optional<double> time_to_ball(const Trajectory& traj, const FluidState& target, double eps);

}  // namespace xmodel
