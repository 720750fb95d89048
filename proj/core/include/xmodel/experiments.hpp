#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "xmodel/config.hpp"
#include "xmodel/report.hpp"

namespace xmodel {

/// Seed of replication `rep` at scale n; a fixed function of the master seed.
std::uint64_t replication_seed(std::uint64_t master, std::int64_t n, std::size_t rep);

/// Integrates the ODE from the configured x0 over [0, T]. Tables:
/// "trajectory" (t, q1, q2, z12, pi) and "summary".
ComparisonReport fluid_experiment(const ExperimentConfig& cfg);

/// Sup over the sample grid of ||mean scaled path - ODE||_1 per n. Fails
/// unless error(n_max) < error(n_min) and error(n_max) <= fwlln_max_error.
/// Throws Error(kOutsideRegime) when the overload conditions fail or x0 is
/// not in A, A+ or S+.
ComparisonReport compare_fwlln(const ExperimentConfig& cfg);

/// Levy distance between the empirical law of D12(t_check) and the FTSP
/// stationary law at x(t_check). Throws Error(kNotInA) unless the ODE stays
/// in A around t_check.
ComparisonReport ap_check(const ExperimentConfig& cfg);

/// Per-s Levy distances between D12(s/n), started from round(n*x0), and the
/// FTSP at x0 started from the same difference. Throws Error(kNotInA)
/// unless x0 is in A.
ComparisonReport time_expansion_check(const ExperimentConfig& cfg);

/// (a) fraction of grid times with Z21 > 0 or an idle agent; (b) sup of
/// |Q1 - r12*Q2| / (log n)^2 over [t1, t2], the part of the ODE's stay in A
/// after `settle` time units.
ComparisonReport ssc_check(const ExperimentConfig& cfg);

/// Time average of the scaled six-dimensional state over [burn_in, T_long]
/// against the embedded stationary point.
ComparisonReport steady_state_check(const ExperimentConfig& cfg);

ComparisonReport run_experiment(const ExperimentConfig& cfg);

struct RunResult {
  ComparisonReport report;
  std::vector<std::filesystem::path> files;
};

/// Loads the config, runs it and writes the report into its output_dir.
RunResult run(const std::filesystem::path& config_path);

}  // namespace xmodel
