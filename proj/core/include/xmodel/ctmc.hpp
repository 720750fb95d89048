#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "xmodel/fluid.hpp"
#include "xmodel/model.hpp"
#include "xmodel/rng.hpp"
#include "xmodel/system_state.hpp"

namespace xmodel {

/// The eight primitive event streams: class-i arrivals, completions of a
/// class-i customer by a pool-j agent, class-i abandonments.
enum class EventKind : std::uint8_t {
  kArrival1,
  kArrival2,
  kService11,
  kService12,
  kService21,
  kService22,
  kAbandon1,
  kAbandon2,
};

inline constexpr std::size_t kEventKinds = 8;

std::string_view to_string(EventKind kind);

/// Cumulative counts along a path. admitted_i counts class-i customers
/// entering service, directly on arrival or from the queue.
struct Counters {
  std::int64_t arrivals1 = 0;
  std::int64_t arrivals2 = 0;
  std::int64_t services11 = 0;
  std::int64_t services12 = 0;
  std::int64_t services21 = 0;
  std::int64_t services22 = 0;
  std::int64_t abandonments1 = 0;
  std::int64_t abandonments2 = 0;
  std::int64_t admitted1 = 0;
  std::int64_t admitted2 = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

/// Throws Error(kIllegalState) unless the state is reachable under FQR-T:
/// nonnegative entries, Z11 + Z21 <= m1, Z12 + Z22 <= m2, Z12 * Z21 = 0,
/// and a positive class-i queue only when pool i is full.
void check_legal(const SystemState& s, const ScaledInstance& inst);
bool is_legal(const SystemState& s, const ScaledInstance& inst);

/// k * D12 with r12 = j/k, i.e. k*(Q1 - k12) - j*Q2. Same sign as D12.
std::int64_t scaled_d12(const SystemState& s, const ScaledInstance& inst);
/// k' * D21 with r21 = j'/k', i.e. j'*Q2 - k'*(k21 + Q1).
std::int64_t scaled_d21(const SystemState& s, const ScaledInstance& inst);

/// Pool 2 helps class 1: D12 > 0, Z21 = 0, Q1 > 0.
bool sharing12_active(const SystemState& s, const ScaledInstance& inst);
/// Pool 1 helps class 2: D21 > 0, Z12 = 0, Q2 > 0.
bool sharing21_active(const SystemState& s, const ScaledInstance& inst);

double event_rate(const SystemState& s, const ScaledInstance& inst, EventKind kind);
double total_rate(const SystemState& s, const ScaledInstance& inst);

/// Applies one primitive event under the FQR-T routing rules. A class-i
/// arrival enters pool i if it has an idle agent and queues otherwise. A
/// freed agent takes a class-1 customer when pool 2 helps class 1, a
/// class-2 customer when pool 1 helps class 2, and otherwise the head of
/// its own class's queue, idling when that queue is empty. Abandonments
/// need a positive queue; service events need a busy agent of that type.
SystemState apply_event(const SystemState& s, const ScaledInstance& inst, EventKind kind,
                        Counters* counters = nullptr);

struct EventOutcome {
  double dwell = 0.0;  ///< infinity when no event is possible
  SystemState state;
  EventKind kind = EventKind::kArrival1;
};

/// One step of the direct method: exponential dwell at the total rate, then
/// an event chosen proportionally to its rate.
EventOutcome next_event(const SystemState& s, const ScaledInstance& inst, CounterRng& rng);

/// Initial state round(n*x0) with both pools full and no reverse sharing:
/// Z11 = m1, Z21 = 0, Z22 = m2 - Z12.
SystemState initial_state(const ScaledInstance& inst, const FluidState& x0);

struct LoggedEvent {
  double time = 0.0;
  EventKind kind = EventKind::kArrival1;
  SystemState state;  ///< state right after the event
};

using EventObserver = std::function<void(double time, EventKind kind, const SystemState& state)>;

struct SimulateOptions {
  double dt_sample = 0.01;
  bool record_events = false;
  /// Called after every event with the post-event state.
  EventObserver observer;
};

/// Grid samples of one CTMC path. states[i] is the state at times[i]
/// (right-continuous: an event at a grid instant is included).
struct SamplePath {
  ScaledInstance instance;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  double dt_sample = 0.0;
  std::vector<double> times;
  std::vector<SystemState> states;
  std::vector<Counters> counters;
  std::vector<LoggedEvent> events;  ///< only with record_events
  std::size_t event_count = 0;
  Counters final_counters;
  SystemState final_state;

  /// Header lines starting with '#' echo the seed and the instance; then
  /// columns t,Q1,Q2,Z11,Z12,Z21,Z22.
  void write_csv(std::ostream& out) const;
};

/// Direct-method simulation on [0, T]; deterministic given seed.
SamplePath simulate(const ScaledInstance& inst, const SystemState& init, double T,
                    std::uint64_t seed, const SimulateOptions& options = {});

/// Fluid-scaled sample path: the (Q1, Q2, Z12)/n trajectory plus the
/// auxiliary coordinates Z11/n, Z21/n, Z22/n.
struct ScaledPath {
  Trajectory trajectory;
  std::vector<double> z11;
  std::vector<double> z21;
  std::vector<double> z22;
};

ScaledPath scale_path(const SamplePath& path, std::int64_t n);

/// Queue-difference series on the sample grid in exact units of 1/den.
struct DifferenceSeries {
  std::vector<double> times;
  std::vector<std::int64_t> values;
  std::int64_t den = 1;

  double value(std::size_t i) const noexcept {
    return static_cast<double>(values[i]) / static_cast<double>(den);
  }
};

/// D12 = Q1 - k12 - r12*Q2.
DifferenceSeries queue_difference(const SamplePath& path, const ScaledInstance& inst);
/// D21 = r21*Q2 - k21 - Q1.
DifferenceSeries queue_difference_21(const SamplePath& path, const ScaledInstance& inst);

/// Bounding processes sampled on the grid alongside the coupled main path.
struct BoundSample {
  std::int64_t z_a = 0;
  std::int64_t z_b = 0;
  std::int64_t q1_a = 0;
  std::int64_t q1_b = 0;
  std::int64_t q2_a = 0;
  std::int64_t q2_b = 0;
  std::int64_t q1_bd = 0;
  std::int64_t q2_bd = 0;
};

struct CoupledPath {
  SamplePath path;
  std::vector<BoundSample> bounds;
  /// Events after which Z_a <= Z12 <= Z_b or Q_ia <= Q_i <= Q_ib failed.
  std::size_t order_violations = 0;
  /// Events after which Q_i <= Q_i,bd failed.
  std::size_t bd_violations = 0;
  std::size_t candidate_events = 0;
};

/// Main path and all bounding processes driven by the same eight primitive
/// streams. Each stream runs at a constant dominating rate (lambda_i^n,
/// mu_ij*m_j^n, theta_i*K_i) and marks every candidate with an agent or
/// customer slot; a candidate is a real event for a process iff its slot is
/// occupied there. The order is checked after every candidate.
CoupledPath coupled_bounds(const ScaledInstance& inst, const SystemState& init, double T,
                           std::uint64_t seed, double dt_sample = 0.01);

}  // namespace xmodel
