#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "xmodel/ctmc.hpp"
#include "xmodel/error.hpp"

namespace xmodel {

namespace {

constexpr std::uint64_t kCouplingTag = 0x434F55504C;
constexpr double kNever = std::numeric_limits<double>::infinity();

struct Bounds {
  std::int64_t z_a, z_b;
  std::array<std::int64_t, 2> q_a, q_b, q_bd, q0;
};

}  // namespace

CoupledPath coupled_bounds(const ScaledInstance& inst, const SystemState& init, double T,
                           std::uint64_t seed, double dt_sample) {
  if (!(T > 0.0) || !(dt_sample > 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "coupled_bounds needs T > 0 and dt_sample > 0");
  }
  check_legal(init, inst);
  const auto& p = inst.params;

  CoupledPath out;
  auto& path = out.path;
  path.instance = inst;
  path.seed = seed;
  path.horizon = T;
  path.dt_sample = dt_sample;
  const auto samples = static_cast<std::size_t>(std::floor(T / dt_sample + 1e-9)) + 1;

  std::array<CounterRng, kEventKinds> rng;
  for (std::size_t k = 0; k < kEventKinds; ++k) rng[k] = CounterRng(derive_seed(seed, kCouplingTag, k));

  SystemState s = init;
  Counters counters;
  Bounds b{init.z12, init.z12, {init.q1, init.q2}, {init.q1, init.q2}, {init.q1, init.q2},
           {init.q1, init.q2}};

  // Slot range of each stream: the number of agents in the serving pool for
  // service streams, K_i for abandonment streams.
  const std::array<double, 4> service_rate{p.mu11 * static_cast<double>(inst.m1_n),
                                           p.mu12 * static_cast<double>(inst.m2_n),
                                           p.mu21 * static_cast<double>(inst.m1_n),
                                           p.mu22 * static_cast<double>(inst.m2_n)};
  const std::array<std::int64_t, 4> service_slots{inst.m1_n, inst.m2_n, inst.m1_n, inst.m2_n};
  const std::array<double, 2> theta{p.theta1, p.theta2};
  auto abandon_range = [&](int i) {
    return std::max({b.q_bd[i], b.q0[i], i == 0 ? s.q1 : s.q2});
  };
  std::array<double, kEventKinds> rate{};
  rate[0] = static_cast<double>(inst.lambda1_n);
  rate[1] = static_cast<double>(inst.lambda2_n);
  for (int k = 0; k < 4; ++k) rate[2 + k] = service_rate[k];
  std::array<std::int64_t, 2> range{abandon_range(0), abandon_range(1)};
  rate[6] = theta[0] * static_cast<double>(range[0]);
  rate[7] = theta[1] * static_cast<double>(range[1]);

  double t = 0.0;
  std::array<double, kEventKinds> next{};
  auto draw = [&](std::size_t k) {
    next[k] = rate[k] > 0.0 ? t + rng[k].exponential() / rate[k] : kNever;
  };
  for (std::size_t k = 0; k < kEventKinds; ++k) draw(k);

  std::size_t next_sample = 0;
  auto record_until = [&](double limit) {
    while (next_sample < samples) {
      const double g = static_cast<double>(next_sample) * dt_sample;
      if (g >= limit) break;
      path.times.push_back(g);
      path.states.push_back(s);
      path.counters.push_back(counters);
      out.bounds.push_back({b.z_a, b.z_b, b.q_a[0], b.q_b[0], b.q_a[1], b.q_b[1], b.q_bd[0], b.q_bd[1]});
      ++next_sample;
    }
  };

  while (true) {
    const auto k = static_cast<std::size_t>(std::min_element(next.begin(), next.end()) - next.begin());
    if (!(next[k] <= T)) break;
    record_until(next[k]);
    t = next[k];
    ++out.candidate_events;
    bool real = false;
    if (k < 2) {
      s = apply_event(s, inst, static_cast<EventKind>(k), &counters);
      ++b.q_b[k];
      ++b.q_bd[k];
      real = true;
    } else if (k < 6) {
      const std::size_t idx = k - 2;
      const auto slot = static_cast<std::int64_t>(rng[k].below(static_cast<std::uint64_t>(service_slots[idx])));
      const std::int64_t busy[] = {s.z11, s.z12, s.z21, s.z22};
      if (slot < busy[idx]) {
        s = apply_event(s, inst, static_cast<EventKind>(k), &counters);
        real = true;
      }
      --b.q_a[0];
      --b.q_a[1];
      if (idx == 1 && slot < b.z_a) --b.z_a;
      if (idx == 3 && slot < inst.m2_n - b.z_b) ++b.z_b;
    } else {
      const int i = static_cast<int>(k - 6);
      const auto slot = static_cast<std::int64_t>(rng[k].below(static_cast<std::uint64_t>(range[i])));
      if (slot < (i == 0 ? s.q1 : s.q2)) {
        s = apply_event(s, inst, static_cast<EventKind>(k), &counters);
        real = true;
      }
      if (slot < b.q0[i]) --b.q_a[i];
      if (slot < b.q_bd[i]) --b.q_bd[i];
    }
    if (real) ++path.event_count;
    draw(k);
    for (int i = 0; i < 2; ++i) {
      const auto r = abandon_range(i);
      if (r != range[i]) {
        range[i] = r;
        rate[6 + i] = theta[i] * static_cast<double>(r);
        draw(6 + static_cast<std::size_t>(i));
      }
    }

    if (b.z_a > s.z12 || s.z12 > b.z_b || b.q_a[0] > s.q1 || s.q1 > b.q_b[0] || b.q_a[1] > s.q2 ||
        s.q2 > b.q_b[1]) {
      ++out.order_violations;
    }
    if (s.q1 > b.q_bd[0] || s.q2 > b.q_bd[1]) ++out.bd_violations;
  }
  record_until(kNever);
  check_legal(s, inst);
  path.final_state = s;
  path.final_counters = counters;
  return out;
}

}  // namespace xmodel
