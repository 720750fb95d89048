#include "xmodel/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "xmodel/error.hpp"
#include "xmodel/format.hpp"

namespace xmodel {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kArrival1: return "A1";
    case EventKind::kArrival2: return "A2";
    case EventKind::kService11: return "S11";
    case EventKind::kService12: return "S12";
    case EventKind::kService21: return "S21";
    case EventKind::kService22: return "S22";
    case EventKind::kAbandon1: return "U1";
    case EventKind::kAbandon2: return "U2";
  }
  return "?";
}

bool is_legal(const SystemState& s, const ScaledInstance& inst) {
  if (s.q1 < 0 || s.q2 < 0 || s.z11 < 0 || s.z12 < 0 || s.z21 < 0 || s.z22 < 0) return false;
  const auto pool1 = s.z11 + s.z21;
  const auto pool2 = s.z12 + s.z22;
  if (pool1 > inst.m1_n || pool2 > inst.m2_n) return false;
  if (s.z12 > 0 && s.z21 > 0) return false;
  if (s.q1 > 0 && pool1 < inst.m1_n) return false;
  if (s.q2 > 0 && pool2 < inst.m2_n) return false;
  return true;
}

void check_legal(const SystemState& s, const ScaledInstance& inst) {
  if (!is_legal(s, inst)) {
    throw Error(ErrorCode::kIllegalState,
                "state (" + std::to_string(s.q1) + ", " + std::to_string(s.q2) + ", " +
                    std::to_string(s.z11) + ", " + std::to_string(s.z12) + ", " +
                    std::to_string(s.z21) + ", " + std::to_string(s.z22) + ") with m = (" +
                    std::to_string(inst.m1_n) + ", " + std::to_string(inst.m2_n) + ")");
  }
}

std::int64_t scaled_d12(const SystemState& s, const ScaledInstance& inst) {
  const auto& r = inst.params.r12;
  return r.den() * (s.q1 - inst.k12_n) - r.num() * s.q2;
}

std::int64_t scaled_d21(const SystemState& s, const ScaledInstance& inst) {
  const auto& r = inst.params.r21;
  return r.num() * s.q2 - r.den() * (inst.k21_n + s.q1);
}

bool sharing12_active(const SystemState& s, const ScaledInstance& inst) {
  return s.z21 == 0 && s.q1 > 0 && scaled_d12(s, inst) > 0;
}

bool sharing21_active(const SystemState& s, const ScaledInstance& inst) {
  return s.z12 == 0 && s.q2 > 0 && scaled_d21(s, inst) > 0;
}

double event_rate(const SystemState& s, const ScaledInstance& inst, EventKind kind) {
  const auto& p = inst.params;
  switch (kind) {
    case EventKind::kArrival1: return static_cast<double>(inst.lambda1_n);
    case EventKind::kArrival2: return static_cast<double>(inst.lambda2_n);
    case EventKind::kService11: return p.mu11 * static_cast<double>(s.z11);
    case EventKind::kService12: return p.mu12 * static_cast<double>(s.z12);
    case EventKind::kService21: return p.mu21 * static_cast<double>(s.z21);
    case EventKind::kService22: return p.mu22 * static_cast<double>(s.z22);
    case EventKind::kAbandon1: return p.theta1 * static_cast<double>(s.q1);
    case EventKind::kAbandon2: return p.theta2 * static_cast<double>(s.q2);
  }
  return 0.0;
}

double total_rate(const SystemState& s, const ScaledInstance& inst) {
  double total = 0.0;
  for (std::size_t k = 0; k < kEventKinds; ++k) total += event_rate(s, inst, static_cast<EventKind>(k));
  return total;
}

namespace {

std::int64_t& busy(SystemState& s, int cls, int pool) {
  if (cls == 1) return pool == 1 ? s.z11 : s.z12;
  return pool == 1 ? s.z21 : s.z22;
}

std::int64_t& queue(SystemState& s, int cls) { return cls == 1 ? s.q1 : s.q2; }

std::int64_t staffing(const ScaledInstance& inst, int pool) { return pool == 1 ? inst.m1_n : inst.m2_n; }

void admit(SystemState& s, int cls, int pool, Counters* c) {
  ++busy(s, cls, pool);
  if (c) ++(cls == 1 ? c->admitted1 : c->admitted2);
}

// A pool-j agent just became free in state `after`; routing conditions are
// evaluated on the pre-event state `before`.
void assign_freed_agent(const SystemState& before, SystemState& after, const ScaledInstance& inst,
                        int pool, Counters* c) {
  int take = 0;
  if (sharing12_active(before, inst)) {
    take = 1;
  } else if (sharing21_active(before, inst)) {
    take = 2;
  } else if (queue(after, pool) > 0) {
    take = pool;
  }
  if (take == 0) return;
  --queue(after, take);
  admit(after, take, pool, c);
}

}  // namespace

SystemState apply_event(const SystemState& s, const ScaledInstance& inst, EventKind kind,
                        Counters* c) {
  SystemState next = s;
  switch (kind) {
    case EventKind::kArrival1:
    case EventKind::kArrival2: {
      const int cls = kind == EventKind::kArrival1 ? 1 : 2;
      if (c) ++(cls == 1 ? c->arrivals1 : c->arrivals2);
      if (busy(next, 1, cls) + busy(next, 2, cls) < staffing(inst, cls)) {
        admit(next, cls, cls, c);
      } else {
        ++queue(next, cls);
      }
      break;
    }
    case EventKind::kService11:
    case EventKind::kService12:
    case EventKind::kService21:
    case EventKind::kService22: {
      const int idx = static_cast<int>(kind) - static_cast<int>(EventKind::kService11);
      const int cls = idx / 2 + 1;
      const int pool = idx % 2 + 1;
      auto& z = busy(next, cls, pool);
      if (z <= 0) {
        throw Error(ErrorCode::kIllegalState,
                    "service completion " + std::string(to_string(kind)) + " with no busy agent");
      }
      --z;
      if (c) {
        std::int64_t* counts[] = {&c->services11, &c->services12, &c->services21, &c->services22};
        ++*counts[idx];
      }
      assign_freed_agent(s, next, inst, pool, c);
      break;
    }
    case EventKind::kAbandon1:
    case EventKind::kAbandon2: {
      const int cls = kind == EventKind::kAbandon1 ? 1 : 2;
      auto& q = queue(next, cls);
      if (q <= 0) {
        throw Error(ErrorCode::kIllegalState, "abandonment from an empty queue");
      }
      --q;
      if (c) ++(cls == 1 ? c->abandonments1 : c->abandonments2);
      break;
    }
  }
  return next;
}

namespace {

EventKind pick_event(const SystemState& s, const ScaledInstance& inst, double total, double u) {
  double target = u * total;
  for (std::size_t k = 0; k + 1 < kEventKinds; ++k) {
    const auto kind = static_cast<EventKind>(k);
    const double rate = event_rate(s, inst, kind);
    if (target < rate) return kind;
    target -= rate;
  }
  // Round-off can push the target past the last bin; take the last kind
  // with positive rate.
  for (std::size_t k = kEventKinds; k-- > 0;) {
    const auto kind = static_cast<EventKind>(k);
    if (event_rate(s, inst, kind) > 0.0) return kind;
  }
  return EventKind::kArrival1;
}

}  // namespace

EventOutcome next_event(const SystemState& s, const ScaledInstance& inst, CounterRng& rng) {
  const double total = total_rate(s, inst);
  if (!(total > 0.0)) return {std::numeric_limits<double>::infinity(), s, EventKind::kArrival1};
  const double dwell = rng.exponential() / total;
  const auto kind = pick_event(s, inst, total, rng.uniform());
  return {dwell, apply_event(s, inst, kind), kind};
}

SystemState initial_state(const ScaledInstance& inst, const FluidState& x0) {
  const double n = static_cast<double>(inst.n);
  SystemState s;
  s.q1 = round_half_up(n * x0.q1);
  s.q2 = round_half_up(n * x0.q2);
  s.z12 = std::min(round_half_up(n * x0.z12), inst.m2_n);
  s.z11 = inst.m1_n;
  s.z21 = 0;
  s.z22 = inst.m2_n - s.z12;
  check_legal(s, inst);
  return s;
}

void SamplePath::write_csv(std::ostream& out) const {
  const auto& p = instance.params;
  out << "# seed=" << seed << " horizon=" << format_number(horizon)
      << " dt_sample=" << format_number(dt_sample) << '\n';
  out << "# n=" << instance.n << " lambda1_n=" << instance.lambda1_n
      << " lambda2_n=" << instance.lambda2_n << " m1_n=" << instance.m1_n
      << " m2_n=" << instance.m2_n << " k12_n=" << instance.k12_n << " k21_n=" << instance.k21_n
      << '\n';
  out << "# mu11=" << format_number(p.mu11) << " mu12=" << format_number(p.mu12)
      << " mu21=" << format_number(p.mu21) << " mu22=" << format_number(p.mu22)
      << " theta1=" << format_number(p.theta1) << " theta2=" << format_number(p.theta2)
      << " r12=" << p.r12.to_string() << " r21=" << p.r21.to_string() << '\n';
  out << "t,Q1,Q2,Z11,Z12,Z21,Z22\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    out << format_number(times[i]) << ',' << s.q1 << ',' << s.q2 << ',' << s.z11 << ',' << s.z12
        << ',' << s.z21 << ',' << s.z22 << '\n';
  }
}

namespace {

std::size_t grid_points(double T, double dt) {
  return static_cast<std::size_t>(std::floor(T / dt + 1e-9)) + 1;
}

}  // namespace

SamplePath simulate(const ScaledInstance& inst, const SystemState& init, double T,
                    std::uint64_t seed, const SimulateOptions& options) {
  if (!(T > 0.0) || !(options.dt_sample > 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "simulate needs T > 0 and dt_sample > 0");
  }
  check_legal(init, inst);
  SamplePath path;
  path.instance = inst;
  path.seed = seed;
  path.horizon = T;
  path.dt_sample = options.dt_sample;
  const std::size_t samples = grid_points(T, options.dt_sample);
  path.times.reserve(samples);
  path.states.reserve(samples);
  path.counters.reserve(samples);

  CounterRng rng(derive_seed(seed, 0x43544D43));
  SystemState s = init;
  Counters counters;
  double t = 0.0;
  std::size_t next_sample = 0;
  auto record_until = [&](double limit) {
    while (next_sample < samples) {
      const double g = static_cast<double>(next_sample) * options.dt_sample;
      if (g >= limit) break;
      path.times.push_back(g);
      path.states.push_back(s);
      path.counters.push_back(counters);
      ++next_sample;
    }
  };

  while (true) {
    const double total = total_rate(s, inst);
    const double dwell = total > 0.0 ? rng.exponential() / total : std::numeric_limits<double>::infinity();
    const double t_next = t + dwell;
    if (t_next > T) break;
    record_until(t_next);
    const auto kind = pick_event(s, inst, total, rng.uniform());
    s = apply_event(s, inst, kind, &counters);
    t = t_next;
    ++path.event_count;
    if (options.record_events) path.events.push_back({t, kind, s});
    if (options.observer) options.observer(t, kind, s);
  }
  record_until(std::numeric_limits<double>::infinity());
  check_legal(s, inst);
  path.final_state = s;
  path.final_counters = counters;
  return path;
}

ScaledPath scale_path(const SamplePath& path, std::int64_t n) {
  const double inv = 1.0 / static_cast<double>(n);
  ScaledPath out;
  out.trajectory.t0 = path.times.empty() ? 0.0 : path.times.front();
  out.trajectory.h = path.dt_sample;
  out.trajectory.states.reserve(path.states.size());
  out.z11.reserve(path.states.size());
  out.z21.reserve(path.states.size());
  out.z22.reserve(path.states.size());
  for (const auto& s : path.states) {
    out.trajectory.states.push_back({static_cast<double>(s.q1) * inv, static_cast<double>(s.q2) * inv,
                                     static_cast<double>(s.z12) * inv});
    out.z11.push_back(static_cast<double>(s.z11) * inv);
    out.z21.push_back(static_cast<double>(s.z21) * inv);
    out.z22.push_back(static_cast<double>(s.z22) * inv);
  }
  return out;
}

DifferenceSeries queue_difference(const SamplePath& path, const ScaledInstance& inst) {
  DifferenceSeries out;
  out.den = inst.params.r12.den();
  out.times = path.times;
  out.values.reserve(path.states.size());
  for (const auto& s : path.states) out.values.push_back(scaled_d12(s, inst));
  return out;
}

DifferenceSeries queue_difference_21(const SamplePath& path, const ScaledInstance& inst) {
  DifferenceSeries out;
  out.den = inst.params.r21.den();
  out.times = path.times;
  out.values.reserve(path.states.size());
  for (const auto& s : path.states) out.values.push_back(scaled_d21(s, inst));
  return out;
}

}  // namespace xmodel
