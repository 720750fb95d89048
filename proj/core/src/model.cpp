#include "xmodel/model.hpp"

#include <algorithm>
#include <cmath>

#include "xmodel/error.hpp"

namespace xmodel {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidParams,
                std::string(name) + " must be finite and > 0, got " + std::to_string(value));
  }
}

}  // namespace

ModelParams canonical_params() {
  ModelParams p;
  p.lambda1 = 1.3;
  p.lambda2 = 0.9;
  p.mu11 = 1.0;
  p.mu22 = 1.0;
  p.mu12 = 0.8;
  p.mu21 = 0.8;
  p.theta1 = 0.5;
  p.theta2 = 0.5;
  p.m1 = 1.0;
  p.m2 = 1.0;
  p.r12 = Ratio(1, 1);
  p.r21 = Ratio(1, 1);
  p.kappa12 = 0.1;
  p.kappa21 = 0.1;
  return p;
}

void validate(const ModelParams& p) {
  require_positive(p.lambda1, "lambda1");
  require_positive(p.lambda2, "lambda2");
  require_positive(p.mu11, "mu11");
  require_positive(p.mu12, "mu12");
  require_positive(p.mu21, "mu21");
  require_positive(p.mu22, "mu22");
  require_positive(p.theta1, "theta1");
  require_positive(p.theta2, "theta2");
  require_positive(p.m1, "m1");
  require_positive(p.m2, "m2");
  require_positive(p.kappa12, "kappa12");
  require_positive(p.kappa21, "kappa21");
  if (p.r12 < p.r21) {
    throw Error(ErrorCode::kInvalidParams,
                "queue ratios must satisfy r12 >= r21, got r12=" + p.r12.to_string() +
                    " r21=" + p.r21.to_string());
  }
}

bool in_state_space(const FluidState& x, const ModelParams& p) {
  return x.q1 >= 0.0 && x.q2 >= 0.0 && x.z12 >= 0.0 && x.z12 <= p.m2;
}

double l1_distance(const FluidState& a, const FluidState& b) {
  return std::abs(a.q1 - b.q1) + std::abs(a.q2 - b.q2) + std::abs(a.z12 - b.z12);
}

DerivedQuantities derived_quantities(const ModelParams& p) {
  DerivedQuantities d;
  d.rho1 = p.lambda1 / (p.mu11 * p.m1);
  d.rho2 = p.lambda2 / (p.mu22 * p.m2);
  d.qa1 = positive_part(p.lambda1 - p.mu11 * p.m1) / p.theta1;
  d.qa2 = positive_part(p.lambda2 - p.mu22 * p.m2) / p.theta2;
  d.sa1 = positive_part(p.m1 - p.lambda1 / p.mu11);
  d.sa2 = positive_part(p.m2 - p.lambda2 / p.mu22);
  return d;
}

std::vector<std::string> validate_overload(const ModelParams& p) {
  const auto d = derived_quantities(p);
  std::vector<std::string> failed;
  if (!(p.theta1 * d.qa1 > p.mu12 * d.sa2)) {
    failed.emplace_back("(1) theta1*qa1 > mu12*sa2 fails: class 1 is not overloaded after help");
  }
  if (!(d.qa1 > p.r12.value() * d.qa2)) {
    failed.emplace_back("(2) qa1 > r12*qa2 fails: class 1 is not the more overloaded class");
  }
  return failed;
}

FtspRates FtspRates::scaled(double c) const {
  return {lam1_minus * c, lamR_minus * c, mu1_minus * c, muR_minus * c,
          lam1_plus * c,  lamR_plus * c,  mu1_plus * c,  muR_plus * c};
}

FtspRates ftsp_rates(const FluidState& gamma, const ModelParams& p) {
  const double z22 = p.m2 - gamma.z12;
  const double pool2_service = p.mu12 * gamma.z12 + p.mu22 * z22;
  FtspRates r;
  r.lam1_minus = p.lambda1;
  r.lamR_minus = pool2_service + p.theta2 * gamma.q2;
  r.mu1_minus = p.mu11 * p.m1 + p.theta1 * gamma.q1;
  r.muR_minus = p.lambda2;
  r.lam1_plus = p.lambda1;
  r.lamR_plus = p.theta2 * gamma.q2;
  r.mu1_plus = p.mu11 * p.m1 + pool2_service + p.theta1 * gamma.q1;
  r.muR_plus = p.lambda2;
  return r;
}

DriftPair drift_pair(const FtspRates& rates, Ratio r) {
  const double rv = r.value();
  return {rv * (rates.lamR_minus - rates.muR_minus) + (rates.lam1_minus - rates.mu1_minus),
          rv * (rates.lamR_plus - rates.muR_plus) + (rates.lam1_plus - rates.mu1_plus)};
}

DriftPair drift_pair(const FluidState& gamma, const ModelParams& p) {
  return drift_pair(ftsp_rates(gamma, p), p.r12);
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::kSPlus: return "S+";
    case Region::kSMinus: return "S-";
    case Region::kBoundaryA: return "A";
    case Region::kBoundaryAPlus: return "A+";
    case Region::kBoundaryAMinus: return "A-";
  }
  return "?";
}

Region classify_region(const FluidState& gamma, const ModelParams& p, double boundary_tol) {
  const double gap = gamma.q1 - p.r12.value() * gamma.q2;
  if (gap > boundary_tol) return Region::kSPlus;
  if (gap < -boundary_tol) return Region::kSMinus;
  const auto drift = drift_pair(gamma, p);
  if (drift.plus >= 0.0) return Region::kBoundaryAPlus;
  if (drift.minus <= 0.0) return Region::kBoundaryAMinus;
  return Region::kBoundaryA;
}

FluidState stationary_point(const ModelParams& p) {
  const double r = p.r12.value();
  const double excess1 = p.lambda1 - p.m1 * p.mu11;
  const double excess2 = p.lambda2 - p.m2 * p.mu22;
  FluidState x;
  x.z12 = (p.theta2 * excess1 - r * p.theta1 * excess2) / (r * p.theta1 * p.mu22 + p.theta2 * p.mu12);
  x.q1 = (excess1 - p.mu12 * x.z12) / p.theta1;
  x.q2 = (p.lambda2 - p.mu22 * (p.m2 - x.z12)) / p.theta2;
  if (!(x.z12 >= 0.0 && x.z12 <= p.m2)) {
    throw Error(ErrorCode::kOutsideRegime,
                "stationary z12* = " + std::to_string(x.z12) + " lies outside [0, m2]");
  }
  if (x.q1 < 0.0 || x.q2 < 0.0) {
    throw Error(ErrorCode::kOutsideRegime, "stationary queue content is negative");
  }
  return x;
}

FluidState6 embed6(const FluidState& x, const ModelParams& p) {
  return {x.q1, x.q2, p.m1, x.z12, 0.0, p.m2 - x.z12};
}

double threshold_scale(std::int64_t n) { return std::pow(static_cast<double>(n), 0.6); }

std::int64_t round_half_up(double x) { return static_cast<std::int64_t>(std::floor(x + 0.5)); }

namespace {

std::int64_t threshold_on_grid(double kappa, std::int64_t n, std::int64_t grid) {
  const std::int64_t raw = round_half_up(kappa * threshold_scale(n));
  const std::int64_t lifted = ((raw + grid - 1) / grid) * grid;
  return std::max(lifted, grid);
}

}  // namespace

ScaledInstance scaled_instance(const ModelParams& p, std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::kInvalidParams, "scale index n must be >= 1");
  validate(p);
  ScaledInstance inst;
  inst.n = n;
  const double nd = static_cast<double>(n);
  inst.lambda1_n = round_half_up(nd * p.lambda1);
  inst.lambda2_n = round_half_up(nd * p.lambda2);
  inst.m1_n = round_half_up(nd * p.m1);
  inst.m2_n = round_half_up(nd * p.m2);
  if (inst.m1_n <= 0 || inst.m2_n <= 0) {
    throw Error(ErrorCode::kInvalidParams,
                "n = " + std::to_string(n) + " rounds a pool's staffing to zero");
  }
  inst.k12_n = threshold_on_grid(p.kappa12, n, p.r12.den());
  inst.k21_n = threshold_on_grid(p.kappa21, n, p.r21.den());
  inst.params = p;
  return inst;
}

}  // namespace xmodel
