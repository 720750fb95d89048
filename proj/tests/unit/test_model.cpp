#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xmodel/error.hpp"
#include "xmodel/model.hpp"
#include "xmodel/params_io.hpp"
#include "xmodel/rational.hpp"

using namespace xmodel;

TEST(Ratio, LowestTermsAndParse) {
  const Ratio r(4, 6);
  EXPECT_EQ(r.num(), 2);
  EXPECT_EQ(r.den(), 3);
  EXPECT_EQ(Ratio::parse("2/3"), r);
  EXPECT_EQ(Ratio::parse("5"), Ratio(5, 1));
  EXPECT_THROW(Ratio(0, 1), Error);
  EXPECT_THROW(Ratio::parse("1/0"), Error);
  EXPECT_TRUE(Ratio(1, 2) < Ratio(2, 3));
}

TEST(DerivedQuantities, Class1Overloaded) {
  const auto dq = derived_quantities(canonical_params());
  EXPECT_DOUBLE_EQ(dq.rho1, 1.3);
  EXPECT_NEAR(dq.qa1, 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(dq.sa1, 0.0);
}

TEST(DerivedQuantities, Class2Underloaded) {
  const auto dq = derived_quantities(canonical_params());
  EXPECT_DOUBLE_EQ(dq.rho2, 0.9);
  EXPECT_DOUBLE_EQ(dq.qa2, 0.0);
  EXPECT_NEAR(dq.sa2, 0.1, 1e-15);
}

TEST(DerivedQuantities, CriticalClassHasNoQueueNoIdleness) {
  auto p = canonical_params();
  p.lambda2 = p.mu22 * p.m2;
  const auto dq = derived_quantities(p);
  EXPECT_DOUBLE_EQ(dq.qa2, 0.0);
  EXPECT_DOUBLE_EQ(dq.sa2, 0.0);
}

TEST(DerivedQuantities, Complementarity) {
  for (double lam : {0.2, 0.7, 1.0, 1.4, 3.0}) {
    auto p = canonical_params();
    p.lambda1 = lam;
    p.lambda2 = 2.0 - lam / 2.0;
    const auto dq = derived_quantities(p);
    EXPECT_EQ(dq.qa1 * dq.sa1, 0.0);
    EXPECT_EQ(dq.qa2 * dq.sa2, 0.0);
  }
}

TEST(ValidateOverload, CanonicalPasses) { EXPECT_TRUE(validate_overload(canonical_params()).empty()); }

TEST(ValidateOverload, UnderloadedClass1Fails) {
  auto p = canonical_params();
  p.lambda1 = 0.9;
  EXPECT_FALSE(validate_overload(p).empty());
}

TEST(ValidateOverload, StrictRatioCondition) {
  // qa1 = r12 * qa2 exactly: lambda2 chosen so that qa2 = qa1.
  auto p = canonical_params();
  p.lambda2 = 1.3;
  const auto dq = derived_quantities(p);
  ASSERT_DOUBLE_EQ(dq.qa1, dq.qa2);
  const auto v = validate_overload(p);
  ASSERT_FALSE(v.empty());
}

TEST(Drift, CanonicalStationaryPoint) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  const auto d = drift_pair(x, p);
  EXPECT_NEAR(d.minus, 0.355556, 1e-6);
  EXPECT_NEAR(d.plus, -1.555556, 1e-6);
  const auto h = oracle::hand_rates(x, p);
  EXPECT_NEAR(d.minus, oracle::hand_delta_minus(h, 1.0), 1e-14);
  EXPECT_NEAR(d.plus, oracle::hand_delta_plus(h, 1.0), 1e-14);
}

TEST(Drift, SymmetricRatesGiveZeroDrift) {
  FtspRates r;
  r.lam1_minus = r.mu1_minus = r.lam1_plus = r.mu1_plus = 1.7;
  r.lamR_minus = r.muR_minus = r.lamR_plus = r.muR_plus = 0.4;
  const auto d = drift_pair(r, Ratio(2, 3));
  EXPECT_DOUBLE_EQ(d.minus, 0.0);
  EXPECT_DOUBLE_EQ(d.plus, 0.0);
}

TEST(Drift, DifferenceIdentity) {
  auto p = canonical_params();
  p.r12 = Ratio(3, 2);
  for (double q1 : {0.0, 0.3, 1.1}) {
    for (double q2 : {0.0, 0.5}) {
      for (double z : {0.0, 0.25, 1.0}) {
        const FluidState g{q1, q2, z};
        const auto d = drift_pair(g, p);
        const double expected = (1.0 + 1.5) * (p.mu12 * z + p.mu22 * (p.m2 - z));
        EXPECT_NEAR(d.minus - d.plus, expected, 1e-13);
      }
    }
  }
}

TEST(FtspRates, MatchHandFormulas) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  const auto r = ftsp_rates(x, p);
  EXPECT_NEAR(r.lamR_minus, 1.077778, 1e-6);
  const auto h = oracle::hand_rates(x, p);
  EXPECT_DOUBLE_EQ(r.lam1_plus, h.lam1_plus);
  EXPECT_NEAR(r.mu1_plus, h.mu1_plus, 1e-15);
  EXPECT_NEAR(r.mu1_minus, h.mu1_minus, 1e-15);
  EXPECT_DOUBLE_EQ(r.muR_minus, p.lambda2);
  EXPECT_DOUBLE_EQ(r.muR_plus, p.lambda2);
}

TEST(FtspRates, FullSharing) {
  const auto p = canonical_params();
  const FluidState g{0.4, 0.2, p.m2};
  const auto r = ftsp_rates(g, p);
  EXPECT_NEAR(r.lamR_plus, p.theta2 * g.q2, 1e-15);
  EXPECT_NEAR(r.mu1_plus, p.mu11 * p.m1 + p.mu12 * p.m2 + p.theta1 * g.q1, 1e-15);
}

TEST(FtspRates, EmptyQueues) {
  const auto p = canonical_params();
  const auto r = ftsp_rates({0.0, 0.0, 0.0}, p);
  EXPECT_DOUBLE_EQ(r.lamR_minus, p.mu22 * p.m2);
  EXPECT_DOUBLE_EQ(r.mu1_minus, p.mu11 * p.m1);
}

TEST(Region, Classification) {
  const auto p = canonical_params();
  EXPECT_EQ(classify_region({1.0, 0.0, 0.5}, p), Region::kSPlus);
  EXPECT_EQ(classify_region({0.0, 1.0, 0.5}, p), Region::kSMinus);
  EXPECT_EQ(classify_region(stationary_point(p), p), Region::kBoundaryA);
  auto heavy2 = p;
  heavy2.lambda2 = 3.0;
  EXPECT_EQ(classify_region({0.5, 0.5, 0.0}, heavy2), Region::kBoundaryAMinus);
  EXPECT_EQ(to_string(Region::kBoundaryAPlus), "A+");
}

TEST(Region, BoundaryAPlus) {
  // Large lambda1 pushes delta_plus above zero on the surface.
  auto p = canonical_params();
  p.lambda1 = 4.0;
  const FluidState g{0.1, 0.1, 0.5};
  ASSERT_GE(drift_pair(g, p).plus, 0.0);
  EXPECT_EQ(classify_region(g, p), Region::kBoundaryAPlus);
}

TEST(Region, ScalingAlongSurfaceStaysOnSurface) {
  const auto p = canonical_params();
  for (double c : {0.5, 2.0, 10.0}) {
    const auto region = classify_region({0.3 * c, 0.3 * c, 0.2}, p);
    EXPECT_TRUE(region == Region::kBoundaryA || region == Region::kBoundaryAPlus ||
                region == Region::kBoundaryAMinus);
  }
}

TEST(StationaryPoint, Canonical) {
  const auto p = canonical_params();
  const auto x = stationary_point(p);
  EXPECT_NEAR(x.z12, 2.0 / 9.0, 1e-12);
  EXPECT_NEAR(x.q1, 0.244444444444, 1e-11);
  EXPECT_NEAR(x.q2, 0.244444444444, 1e-11);
  EXPECT_NEAR(x.q1, p.r12.value() * x.q2, 1e-15);
  EXPECT_TRUE(in_state_space(x, p));
}

TEST(StationaryPoint, AllNumeratorsVanish) {
  auto p = canonical_params();
  p.lambda1 = p.mu11 * p.m1;
  p.lambda2 = p.mu22 * p.m2;
  const auto x = stationary_point(p);
  EXPECT_NEAR(x.z12, 0.0, 1e-15);
  EXPECT_NEAR(x.q1, 0.0, 1e-15);
  EXPECT_NEAR(x.q2, 0.0, 1e-15);
}

TEST(StationaryPoint, OutsideRegimeThrows) {
  auto p = canonical_params();
  p.lambda1 = 5.0;
  try {
    stationary_point(p);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutsideRegime);
  }
}

TEST(ScaledInstance, Canonical100) {
  const auto inst = scaled_instance(canonical_params(), 100);
  EXPECT_EQ(inst.m1_n, 100);
  EXPECT_EQ(inst.m2_n, 100);
  EXPECT_EQ(inst.lambda1_n, 130);
  EXPECT_EQ(inst.lambda2_n, 90);
  EXPECT_EQ(inst.k12_n, round_half_up(0.1 * std::pow(100.0, 0.6)));
}

TEST(ScaledInstance, ThresholdOnRatioGrid) {
  auto p = canonical_params();
  p.r12 = Ratio(5, 3);
  for (std::int64_t n : {1, 7, 100, 1000}) {
    const auto inst = scaled_instance(p, n);
    EXPECT_EQ(inst.k12_n % 3, 0);
    EXPECT_GE(inst.k12_n, 3);
  }
}

TEST(ScaledInstance, ThresholdScaleOrder) {
  for (std::int64_t n : {100, 1000, 10000}) {
    const double c = threshold_scale(n);
    EXPECT_LT(c / n, threshold_scale(n / 10) / (n / 10));
    EXPECT_GT(c / std::sqrt(n), threshold_scale(n / 10) / std::sqrt(n / 10));
  }
}

TEST(ScaledInstance, SingleServer) {
  const auto inst = scaled_instance(canonical_params(), 1);
  EXPECT_EQ(inst.m1_n, 1);
  EXPECT_EQ(inst.m2_n, 1);
  EXPECT_THROW(scaled_instance(canonical_params(), 0), Error);
}

TEST(Embed6, ComponentsThreeAndFive) {
  const auto p = canonical_params();
  const auto x6 = embed6(stationary_point(p), p);
  EXPECT_EQ(x6.z11, p.m1);
  EXPECT_EQ(x6.z21, 0.0);
  EXPECT_NEAR(x6.z22, p.m2 - 2.0 / 9.0, 1e-12);
}

TEST(ParamsToml, RoundTrip) {
  auto p = canonical_params();
  p.r12 = Ratio(3, 2);
  p.lambda1 = 1.2999999999999998;
  EXPECT_EQ(params_from_toml(params_to_toml(p)), p);
}

TEST(ParamsToml, UnknownKeyNamed) {
  const auto text = params_to_toml(canonical_params()) + "bogus = 1\n";
  try {
    params_from_toml(text);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigParse);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(ParamsToml, InvalidValues) {
  auto text = params_to_toml(canonical_params());
  const auto pos = text.find("mu11 = 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 8, "mu11 = -1");
  EXPECT_THROW(params_from_toml(text), Error);
}
