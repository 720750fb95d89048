#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xmodel/model.hpp"
#include "xmodel/report.hpp"

namespace xmodel {

enum class ExperimentKind { kFluid, kFwlln, kAp, kExpand, kSsc, kSteady };

/// "fluid", "fwlln", "ap", "expand", "ssc", "steady".
std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

struct Thresholds {
  double fwlln_max_error = 0.05;
  double ap_max_levy = 0.05;
  double expand_max_levy = 0.1;
  double ssc_min_collapsed = 0.999;
  double steady_max_deviation = 0.05;
};

/// One experiment. TOML layout: top-level scalars with the field names
/// below, x0 either an array [q1, q2, z12] or the string "stationary",
/// and optional [params] and [thresholds] tables. [params] defaults to the
/// canonical configuration.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kFluid;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  OutputFormat format = OutputFormat::kCsv;
  ModelParams params = canonical_params();
  /// Empty means the stationary point of params.
  std::optional<FluidState> x0;
  std::vector<std::int64_t> n_list{200, 2000};
  std::size_t replications = 20;
  double T = 10.0;
  double h = 1e-3;
  double dt_sample = 0.01;
  double t_check = 2.0;
  double s_horizon = 5.0;
  double s_step = 0.1;
  double T_long = 200.0;
  /// Defaults to T_long / 4.
  std::optional<double> burn_in;
  /// Delay after entering A before the SSC window opens.
  double settle = 1.0;
  Thresholds thresholds;

  FluidState initial_point() const;
  double burn_in_time() const { return burn_in.value_or(T_long / 4.0); }
};

/// Throws Error(kConfigParse) naming the offending key, including unknown
/// keys, and when n_list is empty or not ascending or replications is 0.
ExperimentConfig config_from_toml(std::string_view text);
ExperimentConfig config_from_toml_file(const std::filesystem::path& path);

std::string config_to_toml(const ExperimentConfig& cfg);

}  // namespace xmodel
