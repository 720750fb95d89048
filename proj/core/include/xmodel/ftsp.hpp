#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "xmodel/model.hpp"
#include "xmodel/qbd.hpp"
#include "xmodel/system_state.hpp"

namespace xmodel {

/// Stationary solution of the fast-time-scale process at one fluid state.
struct FtspStationary {
  QbdBlocks blocks;
  QbdSolution solution;
};

/// Builds and solves the QBD at gamma. Requires classify_region == A;
/// otherwise throws Error(kNotRecurrent).
FtspStationary solve_ftsp(const FluidState& gamma, const ModelParams& p,
                          const SolveOptions& options = {});

struct PiOptions {
  SolveOptions solver;
  /// Width of the band around q1 = r12*q2 treated as the switching surface.
  double boundary_tol = 0.0;
};

/// P(D(gamma, inf) > 0): 1 on S+ and A+, 0 on S- and A-, and the QBD value
/// on A.
double pi_12(const FluidState& gamma, const ModelParams& p, const PiOptions& options = {});

/// Stationary law of the difference on its lattice (values in units of
/// 1/den), ascending by value.
struct FtspDistribution {
  std::vector<std::int64_t> values;
  std::vector<double> mass;
  std::int64_t den = 1;
  double atom_at_zero = 0.0;

  double total_mass() const;
  double mass_positive() const;
  void write_csv(std::ostream& out) const;
};

FtspDistribution expand_distribution(const QbdBlocks& blocks, const QbdSolution& solution,
                                     double tail_epsilon = 1e-10);
FtspDistribution ftsp_stationary_distribution(const FluidState& gamma, const ModelParams& p,
                                              double tail_epsilon = 1e-10);

/// Piecewise-constant sample path of the FTSP on its integer lattice.
/// values[i] holds on [times[i], times[i+1]).
struct FtspPath {
  std::vector<double> times;
  std::vector<std::int64_t> values;
  std::int64_t den = 1;
  double horizon = 0.0;

  std::int64_t value_at(double s) const;
  /// Long-run fraction of [0, horizon] spent at values > 0.
  double fraction_positive() const;
  /// Same fraction over consecutive equal-length batches.
  std::vector<double> batch_fractions_positive(std::size_t batches) const;
};

/// Exact event-by-event simulation from lattice value d0 (units of 1/den).
FtspPath simulate_ftsp(const FtspRates& rates, Ratio ratio, std::int64_t d0, double horizon,
                       std::uint64_t seed);
FtspPath simulate_ftsp(const FluidState& gamma, const ModelParams& p, std::int64_t d0,
                       double horizon, std::uint64_t seed);

/// The frozen queue-difference process of system n at state Gamma, seen as
/// an FTSP with parameters (lambda^n/n, m^n/n) at gamma_n = Gamma/n and time
/// sped up by time_scale = n.
struct FrozenFtsp {
  ModelParams params;
  FluidState gamma;
  double time_scale = 1.0;
};

FrozenFtsp frozen_as_ftsp(const ScaledInstance& inst, const SystemState& state);

}  // namespace xmodel
