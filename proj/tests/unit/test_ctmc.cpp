#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "xmodel/ctmc.hpp"
#include "xmodel/error.hpp"
#include "xmodel/rng.hpp"

using namespace xmodel;

namespace {

SystemState full(const ScaledInstance& inst, std::int64_t q1, std::int64_t q2, std::int64_t z12) {
  return {q1, q2, inst.m1_n, z12, 0, inst.m2_n - z12};
}

}  // namespace

TEST(NextEvent, EmptySystemOnlyArrives) {
  const auto inst = scaled_instance(canonical_params(), 10);
  const SystemState empty{};
  CounterRng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto e = next_event(empty, inst, rng);
    EXPECT_TRUE(e.kind == EventKind::kArrival1 || e.kind == EventKind::kArrival2);
  }
  EXPECT_DOUBLE_EQ(total_rate(empty, inst), 22.0);
}

TEST(ApplyEvent, Pool2TakesClass1WhenSharingIsOn) {
  const auto inst = scaled_instance(canonical_params(), 100);
  const auto s = full(inst, inst.k12_n + 10, 0, 20);
  ASSERT_GT(scaled_d12(s, inst), 0);
  ASSERT_TRUE(sharing12_active(s, inst));
  for (auto kind : {EventKind::kService22, EventKind::kService12}) {
    const auto t = apply_event(s, inst, kind);
    EXPECT_EQ(t.q1, s.q1 - 1);
    const std::int64_t z12 = kind == EventKind::kService22 ? s.z12 + 1 : s.z12;
    EXPECT_EQ(t.z12, z12);
    EXPECT_EQ(t.z12 + t.z22, inst.m2_n);
  }
}

TEST(ApplyEvent, Pool1ServesOwnQueueWithoutSharing) {
  const auto inst = scaled_instance(canonical_params(), 100);
  const auto s = full(inst, 2, 5, 20);
  ASSERT_LE(scaled_d12(s, inst), 0);
  const auto t = apply_event(s, inst, EventKind::kService11);
  EXPECT_EQ(t.q1, 1);
  EXPECT_EQ(t.z12, 20);
  EXPECT_EQ(t.z11, inst.m1_n);
  // Pool 2 turns back to its own class.
  const auto u = apply_event(s, inst, EventKind::kService12);
  EXPECT_EQ(u.q2, 4);
  EXPECT_EQ(u.z12, 19);
  EXPECT_EQ(u.z22, s.z22 + 1);
}

TEST(ApplyEvent, ArrivalJoinsIdlePool) {
  const auto inst = scaled_instance(canonical_params(), 100);
  SystemState s{0, 0, inst.m1_n - 1, 0, 0, inst.m2_n - 3};
  Counters c;
  const auto t = apply_event(s, inst, EventKind::kArrival1, &c);
  EXPECT_EQ(t.z11, inst.m1_n);
  EXPECT_EQ(t.q1, 0);
  EXPECT_EQ(c.admitted1, 1);
  const auto u = apply_event(t, inst, EventKind::kArrival1, &c);
  EXPECT_EQ(u.q1, 1);
  EXPECT_EQ(c.arrivals1, 2);
  EXPECT_EQ(c.admitted1, 1);
}

TEST(ApplyEvent, ImpossibleEventRejected) {
  const auto inst = scaled_instance(canonical_params(), 100);
  const SystemState s{};
  EXPECT_THROW(apply_event(s, inst, EventKind::kAbandon1), Error);
  EXPECT_THROW(apply_event(s, inst, EventKind::kService12), Error);
}

TEST(Legality, Violations) {
  const auto inst = scaled_instance(canonical_params(), 10);
  EXPECT_TRUE(is_legal(full(inst, 0, 0, 2), inst));
  EXPECT_FALSE(is_legal({0, 0, 5, 1, 1, 5}, inst));   // two-way sharing
  EXPECT_FALSE(is_legal({1, 0, 9, 0, 0, 10}, inst));  // queue with idle own pool
  EXPECT_FALSE(is_legal({0, 0, 11, 0, 0, 0}, inst));  // over capacity
  try {
    check_legal({0, 0, 5, 1, 1, 5}, inst);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIllegalState);
  }
}

TEST(Simulate, QuiescentPathIsConstant) {
  auto p = canonical_params();
  const auto inst = scaled_instance(p, 1);
  // One agent per pool, no arrivals possible once we remove them: use a
  // state with nothing to serve and zero arrival rates.
  auto quiet = inst;
  quiet.lambda1_n = 0;
  quiet.lambda2_n = 0;
  const auto path = simulate(quiet, SystemState{}, 5.0, 3);
  EXPECT_EQ(path.event_count, 0u);
  for (const auto& s : path.states) EXPECT_EQ(s, SystemState{});
}

TEST(Simulate, SameSeedIdenticalPath) {
  const auto inst = scaled_instance(canonical_params(), 100);
  const auto init = initial_state(inst, stationary_point(inst.params));
  const auto a = simulate(inst, init, 3.0, 11);
  const auto b = simulate(inst, init, 3.0, 11);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.final_counters, b.final_counters);
  std::ostringstream sa, sb;
  a.write_csv(sa);
  b.write_csv(sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(simulate(inst, init, 3.0, 12).states, a.states);
}

TEST(Simulate, InvariantsAlongEveryEvent) {
  const auto inst = scaled_instance(canonical_params(), 100);
  for (const FluidState x0 : {stationary_point(inst.params), FluidState{0.6, 0.6, 0.0}, FluidState{0.8, 0.0, 0.9}}) {
    const auto init = initial_state(inst, x0);
    std::size_t seen = 0;
    SimulateOptions opts;
    opts.observer = [&](double, EventKind, const SystemState& s) {
      ++seen;
      ASSERT_EQ(s.z12 * s.z21, 0);
      ASSERT_LE(s.z11 + s.z21, inst.m1_n);
      ASSERT_LE(s.z12 + s.z22, inst.m2_n);
      ASSERT_TRUE(is_legal(s, inst));
    };
    const auto path = simulate(inst, init, 5.0, 21, opts);
    EXPECT_EQ(seen, path.event_count);
    const auto& c = path.final_counters;
    const auto& f = path.final_state;
    EXPECT_EQ(f.q1 - init.q1, c.arrivals1 - c.admitted1 - c.abandonments1);
    EXPECT_EQ(f.q2 - init.q2, c.arrivals2 - c.admitted2 - c.abandonments2);
    EXPECT_EQ(f.z11 + f.z12 - init.z11 - init.z12, c.admitted1 - c.services11 - c.services12);
  }
}

TEST(Simulate, CountersNondecreasing) {
  const auto inst = scaled_instance(canonical_params(), 50);
  const auto path = simulate(inst, initial_state(inst, {0.6, 0.6, 0.0}), 4.0, 5);
  for (std::size_t i = 1; i < path.counters.size(); ++i) {
    const auto& a = path.counters[i - 1];
    const auto& b = path.counters[i];
    EXPECT_LE(a.arrivals1, b.arrivals1);
    EXPECT_LE(a.services12, b.services12);
    EXPECT_LE(a.abandonments2, b.abandonments2);
    EXPECT_LE(a.admitted1, b.admitted1);
  }
}

TEST(Simulate, GridIsRightContinuous) {
  const auto inst = scaled_instance(canonical_params(), 20);
  SimulateOptions opts;
  opts.dt_sample = 0.05;
  opts.record_events = true;
  const auto path = simulate(inst, initial_state(inst, {0.6, 0.6, 0.0}), 2.0, 8, opts);
  ASSERT_EQ(path.times.size(), 41u);
  std::size_t e = 0;
  SystemState current = initial_state(inst, {0.6, 0.6, 0.0});
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    while (e < path.events.size() && path.events[e].time <= path.times[i]) current = path.events[e++].state;
    EXPECT_EQ(path.states[i], current) << "t = " << path.times[i];
  }
}

TEST(Simulate, EventCountMatchesCompensator) {
  const auto inst = scaled_instance(canonical_params(), 100);
  const auto init = initial_state(inst, stationary_point(inst.params));
  double excess = 0.0;
  double compensator = 0.0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    double last = 0.0;
    double integral = 0.0;
    SystemState state = init;
    SimulateOptions opts;
    opts.observer = [&](double t, EventKind, const SystemState& s) {
      integral += total_rate(state, inst) * (t - last);
      last = t;
      state = s;
    };
    const double T = 1.0;
    const auto path = simulate(inst, init, T, 1000 + rep, opts);
    integral += total_rate(state, inst) * (T - last);
    excess += static_cast<double>(path.event_count) - integral;
    compensator += integral;
  }
  EXPECT_LE(std::abs(excess), 3.0 * std::sqrt(compensator));
}

TEST(InitialState, BothPoolsFull) {
  const auto inst = scaled_instance(canonical_params(), 100);
  const auto s = initial_state(inst, {0.6, 0.3, 0.25});
  EXPECT_EQ(s, (SystemState{60, 30, 100, 25, 0, 75}));
}

TEST(ScalePath, UnitScaleIsIdentity) {
  const auto inst = scaled_instance(canonical_params(), 1);
  const auto path = simulate(inst, initial_state(inst, {2.0, 1.0, 1.0}), 3.0, 4);
  const auto sp = scale_path(path, 1);
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    EXPECT_EQ(sp.trajectory.states[i].q1, static_cast<double>(path.states[i].q1));
    EXPECT_EQ(sp.z22[i], static_cast<double>(path.states[i].z22));
  }
}

TEST(ScalePath, StationaryStartAndRanges) {
  const auto inst = scaled_instance(canonical_params(), 1000);
  const auto x = stationary_point(inst.params);
  const auto path = simulate(inst, initial_state(inst, x), 1.0, 4);
  const auto sp = scale_path(path, 1000);
  EXPECT_LE(l1_distance(sp.trajectory.states.front(), x), 3.0 / 1000.0);
  for (std::size_t i = 0; i < sp.z11.size(); ++i) {
    EXPECT_GE(sp.z11[i], 0.0);
    EXPECT_LE(sp.z11[i] + sp.z21[i], 1.0);
    EXPECT_LE(sp.trajectory.states[i].z12 + sp.z22[i], 1.0);
  }
}

TEST(QueueDifference, Values) {
  const auto inst = scaled_instance(canonical_params(), 100);
  SamplePath path;
  path.times = {0.0, 1.0};
  path.states = {full(inst, inst.k12_n, 0, 0), full(inst, inst.k12_n + 5 + 7, 7, 0)};
  const auto d = queue_difference(path, inst);
  EXPECT_EQ(d.value(0), 0.0);
  EXPECT_EQ(d.value(1), 5.0);
  const auto d21 = queue_difference_21(path, inst);
  EXPECT_EQ(d21.value(0), -static_cast<double>(inst.k21_n + inst.k12_n));
  EXPECT_EQ(d21.value(1), 7.0 - static_cast<double>(inst.k21_n) - static_cast<double>(inst.k12_n + 12));
}

TEST(QueueDifference, FractionalRatio) {
  auto p = canonical_params();
  p.r12 = Ratio(3, 2);
  const auto inst = scaled_instance(p, 100);
  SamplePath path;
  path.times = {0.0};
  path.states = {full(inst, inst.k12_n + 2, 1, 0)};
  const auto d = queue_difference(path, inst);
  EXPECT_EQ(d.den, 2);
  EXPECT_EQ(d.value(0), 0.5);
}

TEST(SamplePathCsv, HeaderEchoesSeedAndInstance) {
  const auto inst = scaled_instance(canonical_params(), 10);
  const auto path = simulate(inst, initial_state(inst, {0.6, 0.6, 0.0}), 0.05, 77);
  std::ostringstream out;
  path.write_csv(out);
  const auto text = out.str();
  EXPECT_NE(text.find("seed"), std::string::npos);
  EXPECT_NE(text.find("77"), std::string::npos);
  EXPECT_NE(text.find("t,Q1,Q2,Z11,Z12,Z21,Z22\n"), std::string::npos);
}

TEST(CoupledBounds, StartTogetherAndStayOrdered) {
  const auto inst = scaled_instance(canonical_params(), 50);
  const auto init = initial_state(inst, {0.6, 0.2, 0.4});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = coupled_bounds(inst, init, 3.0, seed);
    ASSERT_FALSE(c.bounds.empty());
    EXPECT_EQ(c.bounds.front().z_a, init.z12);
    EXPECT_EQ(c.bounds.front().z_b, init.z12);
    EXPECT_EQ(c.order_violations, 0u);
    EXPECT_EQ(c.bd_violations, 0u);
    EXPECT_GT(c.candidate_events, 0u);
    for (std::size_t i = 0; i < c.bounds.size(); ++i) {
      const auto& b = c.bounds[i];
      const auto& s = c.path.states[i];
      EXPECT_LE(b.z_a, s.z12);
      EXPECT_LE(s.z12, b.z_b);
      EXPECT_LE(b.q1_a, s.q1);
      EXPECT_LE(s.q1, b.q1_b);
      EXPECT_LE(b.q2_a, s.q2);
      EXPECT_LE(s.q2, b.q2_b);
    }
  }
}

TEST(CoupledBounds, MainPathHasTheRightLaw) {
  // The coupled main path is a thinned uniformization, so its mean must match
  // the direct-method simulation.
  const auto inst = scaled_instance(canonical_params(), 50);
  const auto init = initial_state(inst, {0.6, 0.6, 0.0});
  const int reps = 400;
  double a = 0.0, b = 0.0, va = 0.0, vb = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double x = static_cast<double>(coupled_bounds(inst, init, 1.0, 5000 + r).path.final_state.q1);
    const double y = static_cast<double>(simulate(inst, init, 1.0, 9000 + r).final_state.q1);
    a += x;
    b += y;
    va += x * x;
    vb += y * y;
  }
  a /= reps;
  b /= reps;
  va = va / reps - a * a;
  vb = vb / reps - b * b;
  EXPECT_LE(std::abs(a - b), 4.0 * std::sqrt((va + vb) / reps));
}

TEST(CoupledBounds, PureDeathBoundFollowsItsFluidLimit) {
  const auto p = canonical_params();
  const auto inst = scaled_instance(p, 2000);
  const FluidState x0{0.6, 0.2, 0.5};
  const auto init = initial_state(inst, x0);
  const auto c = coupled_bounds(inst, init, 3.0, 31);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.bounds.size(); ++i) {
    const double fluid = x0.z12 * std::exp(-p.mu12 * c.path.times[i]);
    worst = std::max(worst, std::abs(static_cast<double>(c.bounds[i].z_a) / 2000.0 - fluid));
  }
  EXPECT_LE(worst, 0.05);
}
