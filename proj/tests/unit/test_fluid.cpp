#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xmodel/error.hpp"
#include "xmodel/fluid.hpp"

using namespace xmodel;

namespace {

double l1(const FluidState& a, const FluidState& b) { return l1_distance(a, b); }

// Least-squares slope and R^2 of log d(t) against t.
std::pair<double, double> log_fit(const Trajectory& tr, const FluidState& target, double a, double b) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.time(i);
    if (t < a || t > b) continue;
    xs.push_back(t);
    ys.push_back(std::log(l1(tr.states[i], target)));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return {sxy / sxx, sxy * sxy / (sxx * syy)};
}

}  // namespace

TEST(OdeRhs, ZeroAtStationaryPoint) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  const auto v = ode_rhs(x, p);
  EXPECT_NEAR(v.dq1, 0.0, 1e-10);
  EXPECT_NEAR(v.dq2, 0.0, 1e-10);
  EXPECT_NEAR(v.dz12, 0.0, 1e-10);
  const auto w = ode_rhs(x, p, oracle::balance_pi(x, p));
  EXPECT_NEAR(w.dq1, 0.0, 1e-12);
  EXPECT_NEAR(w.dq2, 0.0, 1e-12);
  EXPECT_NEAR(w.dz12, 0.0, 1e-12);
}

TEST(OdeRhs, ZeroAtStationaryPointOfOtherConfigs) {
  auto p = canonical_params();
  for (double lam1 : {1.2, 1.5, 1.7}) {
    p.lambda1 = lam1;
    if (!validate_overload(p).empty()) continue;
    const auto x = stationary_point(p);
    const auto v = ode_rhs(x, p, oracle::balance_pi(x, p));
    EXPECT_NEAR(std::abs(v.dq1) + std::abs(v.dq2) + std::abs(v.dz12), 0.0, 1e-12);
  }
}

TEST(OdeRhs, SharingSides) {
  const auto p = canonical_params();
  const FluidState plus{1.0, 0.0, 0.3};
  EXPECT_NEAR(ode_rhs(plus, p).dz12, p.mu22 * (p.m2 - 0.3), 1e-15);
  const FluidState minus{0.0, 1.0, 0.3};
  EXPECT_NEAR(ode_rhs(minus, p).dz12, -p.mu12 * 0.3, 1e-15);
}

TEST(Integrate, FixedPointStaysPut) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  const auto tr = integrate(x, p, 5.0, 1e-3);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_LE(l1(tr.states[i], x), 1e-8 * (1.0 + tr.time(i)));
}

TEST(Integrate, ConvergesFromCanonicalStart) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  const auto tr = integrate({0.6, 0.6, 0.0}, p, 20.0, 1e-3);
  EXPECT_NEAR(tr.end_time(), 20.0, 1e-9);
  EXPECT_LE(l1(tr.states.back(), x), 1e-3);
  const auto reach = time_to_ball(tr, x, 0.01);
  ASSERT_TRUE(reach.has_value());
  EXPECT_LE(*reach, 20.0);
}

TEST(Integrate, FineStepOracle) {
  const auto p = canonical_params();
  const auto coarse = integrate({0.6, 0.6, 0.0}, p, 20.0, 1e-3);
  const auto fine = integrate({0.6, 0.6, 0.0}, p, 20.0, 1e-4);
  EXPECT_LE(l1(fine.states.back(), stationary_point(p)), 1e-3);
  EXPECT_LE(l1(coarse.states.back(), fine.states.back()), 1e-3);
}

TEST(Integrate, StaysInStateSpace) {
  const auto p = canonical_params();
  for (const FluidState x0 : {FluidState{0.6, 0.6, 0.0}, FluidState{0.1, 0.1, 0.5}, FluidState{1.0, 0.0, 1.0}}) {
    const auto tr = integrate(x0, p, 10.0, 1e-3);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      EXPECT_TRUE(in_state_space(tr.states[i], p));
      EXPECT_GE(tr.pi_values[i], 0.0);
      EXPECT_LE(tr.pi_values[i], 1.0);
    }
  }
}

TEST(Integrate, ExponentialApproach) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  for (const FluidState x0 : {FluidState{0.6, 0.6, 0.0}, FluidState{0.1, 0.1, 0.5}}) {
    const auto tr = integrate(x0, p, 20.0, 1e-3);
    const std::size_t lag = 5000;
    for (std::size_t i = 1000; i + lag < tr.size(); i += 100) {
      EXPECT_LT(l1(tr.states[i + lag], x), l1(tr.states[i], x)) << "t = " << tr.time(i);
    }
    const auto [slope, r2] = log_fit(tr, x, 2.0, 15.0);
    EXPECT_LT(slope, 0.0);
    EXPECT_GE(r2, 0.95);
  }
}

TEST(Integrate, FirstOrderInStep) {
  const auto p = canonical_params();
  const FluidState x0{0.6, 0.6, 0.0};
  const auto a = integrate(x0, p, 4.0, 4e-3).states.back();
  const auto b = integrate(x0, p, 4.0, 2e-3).states.back();
  const auto c = integrate(x0, p, 4.0, 1e-3).states.back();
  const double e1 = l1(a, b);
  const double e2 = l1(b, c);
  ASSERT_GT(e2, 0.0);
  EXPECT_GT(e1 / e2, 1.5);
  EXPECT_LT(e1 / e2, 2.6);
}

TEST(Integrate, TrapezoidReproducesIncrements) {
  // The integral form: x(t) - x(0) = integral of the right-hand side.
  const auto p = canonical_params();
  auto defect = [&](double h) {
    const auto tr = integrate({0.6, 0.6, 0.0}, p, 5.0, h);
    FluidState acc{0, 0, 0};
    double worst = 0.0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const auto f0 = ode_rhs(tr.states[i - 1], p, tr.pi_values[i - 1]);
      const auto f1 = ode_rhs(tr.states[i], p, tr.pi_values[i]);
      acc.q1 += 0.5 * h * (f0.dq1 + f1.dq1);
      acc.q2 += 0.5 * h * (f0.dq2 + f1.dq2);
      acc.z12 += 0.5 * h * (f0.dz12 + f1.dz12);
      const FluidState inc{tr.states[i].q1 - tr.states[0].q1, tr.states[i].q2 - tr.states[0].q2,
                           tr.states[i].z12 - tr.states[0].z12};
      worst = std::max(worst, l1(inc, acc));
    }
    return worst;
  };
  const double d1 = defect(2e-3);
  const double d2 = defect(1e-3);
  EXPECT_LT(d1, 0.05);
  EXPECT_LT(d2, 0.6 * d1);
}

TEST(Integrate, RejectsBadInput) {
  const auto p = canonical_params();
  EXPECT_THROW(integrate({0.1, 0.1, 0.1}, p, 1.0, 0.0), Error);
  EXPECT_THROW(integrate({-0.1, 0.1, 0.1}, p, 1.0, 1e-3), Error);
}

TEST(Integrate, LargeStepIsProjected) {
  // The velocity never exceeds the total-rate bound, so even a crude step
  // only needs projection.
  const auto p = canonical_params();
  const auto tr = integrate({0.6, 0.6, 0.0}, p, 10.0, 2.5);
  for (const auto& s : tr.states) EXPECT_TRUE(in_state_space(s, p));
}

TEST(TimeToBall, Cases) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  Trajectory inside{1.5, 0.1, {x, x}, {0.2, 0.2}};
  EXPECT_EQ(time_to_ball(inside, x, 1e-6), 1.5);
  const FluidState far{1.0, 1.0, 1.0};
  Trajectory constant{0.0, 0.1, {far, far, far}, {}};
  EXPECT_FALSE(time_to_ball(constant, x, 0.01).has_value());
}

TEST(Trajectory, CsvAndInterpolation) {
  Trajectory tr{0.0, 0.5, {{0, 0, 0}, {1, 2, 0.5}}, {0.0, 1.0}};
  const auto mid = tr.state_at(0.25);
  EXPECT_DOUBLE_EQ(mid.q1, 0.5);
  EXPECT_DOUBLE_EQ(mid.q2, 1.0);
  std::ostringstream out;
  tr.write_csv(out);
  EXPECT_EQ(out.str(), "t,q1,q2,z12,pi\n0,0,0,0,0\n0.5,1,2,0.5,1\n");
}
