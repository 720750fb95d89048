#include "oracles.hpp"

#include <vector>

#include <Eigen/Dense>

namespace oracle {

Rates hand_rates(const xmodel::FluidState& g, const xmodel::ModelParams& p) {
  const double z22 = p.m2 - g.z12;
  const double pool2 = p.mu12 * g.z12 + p.mu22 * z22;
  Rates r{};
  r.lam1_minus = p.lambda1;
  r.lamR_minus = pool2 + p.theta2 * g.q2;
  r.mu1_minus = p.mu11 * p.m1 + p.theta1 * g.q1;
  r.muR_minus = p.lambda2;
  r.lam1_plus = p.lambda1;
  r.lamR_plus = p.theta2 * g.q2;
  r.mu1_plus = p.mu11 * p.m1 + pool2 + p.theta1 * g.q1;
  r.muR_plus = p.lambda2;
  return r;
}

double hand_delta_minus(const Rates& r, double ratio) {
  return ratio * (r.lamR_minus - r.muR_minus) + (r.lam1_minus - r.mu1_minus);
}

double hand_delta_plus(const Rates& r, double ratio) {
  return ratio * (r.lamR_plus - r.muR_plus) + (r.lam1_plus - r.mu1_plus);
}

std::map<std::int64_t, double> truncated_stationary(const Rates& r, std::int64_t j, std::int64_t k,
                                                    std::int64_t bound) {
  const auto n = static_cast<Eigen::Index>(2 * bound + 1);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  auto idx = [&](std::int64_t v) { return static_cast<Eigen::Index>(v + bound); };
  for (std::int64_t v = -bound; v <= bound; ++v) {
    const bool pos = v > 0;
    const std::pair<std::int64_t, double> jumps[] = {
        {+k, pos ? r.lam1_plus : r.lam1_minus},
        {-k, pos ? r.mu1_plus : r.mu1_minus},
        {+j, pos ? r.lamR_plus : r.lamR_minus},
        {-j, pos ? r.muR_plus : r.muR_minus},
    };
    for (const auto& [step, rate] : jumps) {
      const auto w = v + step;
      if (w < -bound || w > bound || rate == 0.0) continue;
      Q(idx(v), idx(w)) += rate;
      Q(idx(v), idx(v)) -= rate;
    }
  }
  // pi Q = 0 with sum(pi) = 1: replace one balance equation by normalization.
  Eigen::MatrixXd M = Q.transpose();
  M.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd pi = M.partialPivLu().solve(rhs);
  std::map<std::int64_t, double> law;
  for (std::int64_t v = -bound; v <= bound; ++v) law[v] = pi(idx(v));
  return law;
}

double mass_positive(const std::map<std::int64_t, double>& law) {
  double s = 0.0;
  for (const auto& [v, m] : law) {
    if (v > 0) s += m;
  }
  return s;
}

double balance_pi(const xmodel::FluidState& x, const xmodel::ModelParams& p) {
  const double a = p.mu12 * x.z12;
  return a / (a + p.mu22 * (p.m2 - x.z12));
}

FrozenDrifts frozen_drifts(const xmodel::ScaledInstance& inst, const xmodel::SystemState& s) {
  const auto& p = inst.params;
  const double ratio = p.r12.value();
  const double z22 = static_cast<double>(inst.m2_n - s.z12);
  const double pool2 = p.mu12 * static_cast<double>(s.z12) + p.mu22 * z22;
  const double lam1 = static_cast<double>(inst.lambda1_n);
  const double lam2 = static_cast<double>(inst.lambda2_n);
  const double out1 = p.mu11 * static_cast<double>(inst.m1_n) + p.theta1 * static_cast<double>(s.q1);
  const double ab2 = p.theta2 * static_cast<double>(s.q2);
  return {ratio * (pool2 + ab2 - lam2) + (lam1 - out1), ratio * (ab2 - lam2) + (lam1 - out1 - pool2)};
}

}  // namespace oracle
