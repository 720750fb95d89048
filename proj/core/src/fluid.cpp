#include "xmodel/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "xmodel/error.hpp"
#include "xmodel/format.hpp"

namespace xmodel {

FluidVelocity ode_rhs(const FluidState& g, const ModelParams& p, double pi) {
  const double z22 = p.m2 - g.z12;
  const double pool2 = g.z12 * p.mu12 + z22 * p.mu22;
  return {
      p.lambda1 - p.m1 * p.mu11 - pi * pool2 - p.theta1 * g.q1,
      p.lambda2 - (1.0 - pi) * pool2 - p.theta2 * g.q2,
      pi * z22 * p.mu22 - (1.0 - pi) * g.z12 * p.mu12,
  };
}

FluidVelocity ode_rhs(const FluidState& gamma, const ModelParams& p, const PiOptions& options) {
  return ode_rhs(gamma, p, pi_12(gamma, p, options));
}

FluidState Trajectory::state_at(double t) const {
  if (states.empty()) throw Error(ErrorCode::kInvalidParams, "empty trajectory");
  if (t <= t0 || h <= 0.0) return states.front();
  const double u = (t - t0) / h;
  const auto i = static_cast<std::size_t>(std::floor(u));
  if (i + 1 >= states.size()) return states.back();
  const double w = u - static_cast<double>(i);
  const auto& a = states[i];
  const auto& b = states[i + 1];
  return {a.q1 + w * (b.q1 - a.q1), a.q2 + w * (b.q2 - a.q2), a.z12 + w * (b.z12 - a.z12)};
}

void Trajectory::write_csv(std::ostream& out) const {
  // Scaled simulation paths carry no pi column.
  const bool with_pi = pi_values.size() == states.size();
  out << (with_pi ? "t,q1,q2,z12,pi\n" : "t,q1,q2,z12\n");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    out << format_number(time(i)) << ',' << format_number(s.q1) << ',' << format_number(s.q2) << ','
        << format_number(s.z12);
    if (with_pi) out << ',' << format_number(pi_values[i]);
    out << '\n';
  }
}

namespace {

class EulerStepper {
 public:
  EulerStepper(const ModelParams& p, const IntegrateOptions& options)
      : p_(p), options_(options), r_(p.r12.value()) {}

  /// Advances x by h; returns the pi used by the first sub-step.
  double step(FluidState& x, double h) {
    double remaining = h;
    double first_pi = -1.0;
    // A step is cut at most at one crossing per side; more sub-steps than
    // this would mean the dispatch is cycling.
    for (int sub = 0; sub < 8 && remaining > 0.0; ++sub) {
      const Region region = classify_region(x, p_, options_.boundary_tol);
      const double pi = pi_for(x, region);
      if (first_pi < 0.0) first_pi = pi;
      const auto v = ode_rhs(x, p_, pi);
      const double g = gap(x);
      FluidState next{x.q1 + remaining * v.dq1, x.q2 + remaining * v.dq2, x.z12 + remaining * v.dz12};
      const double g_next = gap(next);
      const bool crosses = (region == Region::kSPlus && g_next < -options_.boundary_tol) ||
                           (region == Region::kSMinus && g_next > options_.boundary_tol);
      if (crosses) {
        const double dt = remaining * g / (g - g_next);
        x = {x.q1 + dt * v.dq1, x.q2 + dt * v.dq2, x.z12 + dt * v.dz12};
        snap(x);
        project(x, x, h);
        remaining -= dt;
        continue;
      }
      if (region == Region::kBoundaryA) snap(next);
      project(next, x, h);
      x = next;
      remaining = 0.0;
    }
    return first_pi;
  }

  double pi_for(const FluidState& x, Region region) {
    switch (region) {
      case Region::kSPlus:
      case Region::kBoundaryAPlus:
        return 1.0;
      case Region::kSMinus:
      case Region::kBoundaryAMinus:
        return 0.0;
      case Region::kBoundaryA:
        break;
    }
    const auto blocks = build_qbd(x, p_);
    SolveOptions solver = options_.solver;
    if (last_r_ && last_r_->rows() == blocks.phases()) solver.warm_start = last_r_;
    QbdSolution sol;
    try {
      sol = solve_rate_matrix(blocks, solver);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonConverged) throw;
      SolveOptions fallback;
      fallback.tol = solver.tol;
      sol = solve_rate_matrix(blocks, fallback);
    }
    last_r_ = sol.R;
    return sol.pi_positive;
  }

 private:
  double gap(const FluidState& x) const { return x.q1 - r_ * x.q2; }

  // Orthogonal projection onto q1 = r*q2.
  void snap(FluidState& x) const {
    const double g = gap(x);
    const double denom = 1.0 + r_ * r_;
    x.q1 -= g / denom;
    x.q2 += r_ * g / denom;
  }

  void project(FluidState& x, const FluidState& from, double h) const {
    const double excess = std::max({0.0, -x.q1, -x.q2, -x.z12, x.z12 - p_.m2});
    if (excess > 0.0) {
      const double bound = p_.lambda1 + p_.lambda2 + p_.mu11 * p_.m1 +
                           2.0 * (p_.mu12 + p_.mu22) * p_.m2 + p_.theta1 * from.q1 +
                           p_.theta2 * from.q2;
      if (excess > h * bound * (1.0 + 1e-12)) {
        throw Error(ErrorCode::kStepTooLarge,
                    "Euler step leaves the state space by " + std::to_string(excess));
      }
    }
    x.q1 = std::max(0.0, x.q1);
    x.q2 = std::max(0.0, x.q2);
    x.z12 = std::clamp(x.z12, 0.0, p_.m2);
  }

  const ModelParams& p_;
  IntegrateOptions options_;
  double r_;
  std::optional<Eigen::MatrixXd> last_r_;
};

}  // namespace

Trajectory integrate(const FluidState& x0, const ModelParams& p, double T, double h,
                     const IntegrateOptions& options) {
  validate(p);
  if (!(h > 0.0) || !(T >= 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "integrate needs h > 0 and T >= 0");
  }
  if (!in_state_space(x0, p)) throw Error(ErrorCode::kInvalidParams, "x0 is outside the state space");
  const auto steps = static_cast<std::size_t>(std::llround(T / h));
  Trajectory traj;
  traj.h = h;
  traj.states.reserve(steps + 1);
  traj.pi_values.reserve(steps + 1);
  EulerStepper stepper(p, options);
  FluidState x = x0;
  traj.states.push_back(x);
  for (std::size_t i = 0; i < steps; ++i) {
    traj.pi_values.push_back(stepper.step(x, h));
    traj.states.push_back(x);
  }
  traj.pi_values.push_back(
      stepper.pi_for(x, classify_region(x, p, options.boundary_tol)));
  return traj;
}

std::optional<double> time_to_ball(const Trajectory& traj, const FluidState& target, double eps) {
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (l1_distance(traj.states[i], target) <= eps) return traj.time(i);
  }
  return std::nullopt;
}

}  // namespace xmodel
