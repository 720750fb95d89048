#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xmodel/config.hpp"
#include "xmodel/ctmc.hpp"
#include "xmodel/error.hpp"
#include "xmodel/experiments.hpp"
#include "xmodel/fluid.hpp"
#include "xmodel/format.hpp"
#include "xmodel/ftsp.hpp"
#include "xmodel/params_io.hpp"
#include "xmodel/report.hpp"

namespace {

using namespace xmodel;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct CommonFlags {
  std::string config;
  std::string params;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (TOML)");
  cmd->add_option("--seed", f.seed, "Master seed, overrides the config");
  cmd->add_option("--out", f.out, "Output directory, overrides the config");
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

FluidState parse_point(const std::vector<double>& v) {
  if (v.size() != 3) throw Error(ErrorCode::kInvalidParams, "a state needs three numbers q1 q2 z12");
  return {v[0], v[1], v[2]};
}

ExperimentConfig load_config(const CommonFlags& f, ExperimentKind kind, bool require_file) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = config_from_toml_file(f.config);
  } else if (require_file) {
    throw Error(ErrorCode::kConfigParse, "--config is required");
  }
  if (!f.params.empty()) cfg.params = params_from_toml_file(f.params);
  cfg.kind = kind;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.format.empty()) cfg.format = parse_output_format(f.format);
  return cfg;
}

void print_report(const ComparisonReport& report, const std::vector<std::filesystem::path>& files) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << format_number(c.value) << ' '
              << c.relation << ' ' << format_number(c.threshold) << '\n';
  }
  if (!report.tables.empty()) report.tables.front().write_csv(std::cout);
  for (const auto& file : files) std::cout << "wrote " << file.string() << '\n';
}

int run_and_report(const ExperimentConfig& cfg) {
  const auto report = run_experiment(cfg);
  const auto files = write_report(report, cfg.output_dir, cfg.format);
  print_report(report, files);
  return report.passed() ? 0 : kExitFail;
}

// Key/value pairs printed as "key,value" lines or one JSON object.
class KeyValues {
 public:
  void add(const std::string& key, double value) { entries_.emplace_back(key, json_number(value)); }
  void add_text(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, json_quote(value));
  }

  void print(std::ostream& out, OutputFormat format) const {
    if (format == OutputFormat::kJson) {
      out << "{";
      for (std::size_t i = 0; i < entries_.size(); ++i) {
        out << (i ? ",\n " : "\n ") << json_quote(entries_[i].first) << ": " << entries_[i].second;
      }
      out << "\n}\n";
      return;
    }
    out << "key,value\n";
    for (const auto& [key, value] : entries_) {
      const bool quoted = !value.empty() && value.front() == '"';
      out << key << ',' << (quoted ? value.substr(1, value.size() - 2) : value) << '\n';
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

OutputFormat format_of(const CommonFlags& f) {
  return f.format.empty() ? OutputFormat::kCsv : parse_output_format(f.format);
}

int cmd_stationary(const CommonFlags& f) {
  const auto cfg = load_config(f, ExperimentKind::kFluid, false);
  const auto& p = cfg.params;
  KeyValues kv;
  const auto dq = derived_quantities(p);
  kv.add("rho1", dq.rho1);
  kv.add("rho2", dq.rho2);
  kv.add("qa1", dq.qa1);
  kv.add("qa2", dq.qa2);
  kv.add("sa1", dq.sa1);
  kv.add("sa2", dq.sa2);
  std::string violations;
  for (const auto& v : validate_overload(p)) violations += (violations.empty() ? "" : "; ") + v;
  kv.add_text("overload_violations", violations);
  const auto star = stationary_point(p);
  kv.add("q1", star.q1);
  kv.add("q2", star.q2);
  kv.add("z12", star.z12);
  const auto drift = drift_pair(star, p);
  kv.add("delta_minus", drift.minus);
  kv.add("delta_plus", drift.plus);
  const auto region = classify_region(star, p);
  kv.add_text("region", std::string(to_string(region)));
  kv.add("pi_12", pi_12(star, p));
  kv.print(std::cout, format_of(f));
  return 0;
}

int cmd_ftsp_pi(const CommonFlags& f, const std::vector<double>& state) {
  const auto cfg = load_config(f, ExperimentKind::kFluid, false);
  const auto& p = cfg.params;
  const auto gamma = state.empty() ? stationary_point(p) : parse_point(state);
  const auto region = classify_region(gamma, p);
  KeyValues kv;
  kv.add_text("region", std::string(to_string(region)));
  const auto drift = drift_pair(gamma, p);
  kv.add("delta_minus", drift.minus);
  kv.add("delta_plus", drift.plus);
  kv.add("pi_12", pi_12(gamma, p));
  if (region == Region::kBoundaryA) {
    const auto solved = solve_ftsp(gamma, p);
    const auto& sol = solved.solution;
    kv.add("atom_at_zero", sol.atom_at_zero);
    kv.add("spectral_radius_R", sol.spectral_radius_R);
    kv.add("residual", sol.residual);
    kv.add("iterations", static_cast<double>(sol.iterations));
    if (!f.out.empty()) {
      std::filesystem::create_directories(f.out);
      const auto path = std::filesystem::path(f.out) / "ftsp_distribution.csv";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
      expand_distribution(solved.blocks, sol).write_csv(out);
      kv.add_text("distribution", path.string());
    }
  }
  kv.print(std::cout, format_of(f));
  return 0;
}

int cmd_fluid(const CommonFlags& f, const std::vector<double>& x0, std::optional<double> T,
              std::optional<double> h) {
  auto cfg = load_config(f, ExperimentKind::kFluid, false);
  if (!x0.empty()) cfg.x0 = parse_point(x0);
  if (T) cfg.T = *T;
  if (h) cfg.h = *h;
  return run_and_report(cfg);
}

int cmd_simulate(const CommonFlags& f, std::int64_t n, const std::vector<double>& x0,
                 std::optional<double> T) {
  auto cfg = load_config(f, ExperimentKind::kFluid, false);
  if (!x0.empty()) cfg.x0 = parse_point(x0);
  if (T) cfg.T = *T;
  const auto inst = scaled_instance(cfg.params, n);
  const auto init = initial_state(inst, cfg.initial_point());
  SimulateOptions opts;
  opts.dt_sample = cfg.dt_sample;
  const auto path = simulate(inst, init, cfg.T, cfg.seed, opts);
  if (f.out.empty()) {
    path.write_csv(std::cout);
    return 0;
  }
  std::filesystem::create_directories(f.out);
  const auto file = std::filesystem::path(f.out) / ("simulate_n" + std::to_string(n) + ".csv");
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + file.string() + "'");
  path.write_csv(out);
  std::cout << "wrote " << file.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"X-model many-server queue under FQR-T: fluid limit, FTSP and simulation"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<double> point;
  std::optional<double> horizon;
  std::optional<double> step;
  std::int64_t n = 100;

  auto* fluid = app.add_subcommand("fluid", "Integrate the fluid ODE");
  add_common(fluid, flags);
  fluid->add_option("--x0", point, "Initial state q1 q2 z12")->expected(3);
  fluid->add_option("--T", horizon, "Horizon");
  fluid->add_option("--step", step, "Euler step h");

  auto* stationary = app.add_subcommand("stationary", "Stationary point, drifts and region");
  add_common(stationary, flags);
  stationary->add_option("--params", flags.params, "Flat TOML parameter file");

  auto* ftsp = app.add_subcommand("ftsp-pi", "FTSP stationary probability at a state");
  add_common(ftsp, flags);
  ftsp->add_option("--params", flags.params, "Flat TOML parameter file");
  ftsp->add_option("--state", point, "State q1 q2 z12 (default: stationary point)")->expected(3);

  auto* sim = app.add_subcommand("simulate", "Simulate one CTMC path");
  add_common(sim, flags);
  sim->add_option("--params", flags.params, "Flat TOML parameter file");
  sim->add_option("--n", n, "Scale index")->check(CLI::PositiveNumber);
  sim->add_option("--x0", point, "Initial fluid state q1 q2 z12")->expected(3);
  sim->add_option("--T", horizon, "Horizon");

  struct Experiment {
    const char* name;
    const char* help;
    ExperimentKind kind;
  };
  const Experiment experiments[] = {
      {"fwlln", "Fluid limit comparison across n", ExperimentKind::kFwlln},
      {"ap", "Averaging principle check", ExperimentKind::kAp},
      {"ssc", "State-space collapse metrics", ExperimentKind::kSsc},
      {"steady", "Stationary time averages against the fixed point", ExperimentKind::kSteady},
      {"expand", "Time-expanded queue difference against the FTSP", ExperimentKind::kExpand},
  };
  std::vector<std::pair<CLI::App*, ExperimentKind>> experiment_cmds;
  for (const auto& e : experiments) {
    auto* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, flags);
    experiment_cmds.emplace_back(cmd, e.kind);
  }
  auto* run_cmd = app.add_subcommand("run", "Run the experiment named in a config file");
  add_common(run_cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fluid->parsed()) return cmd_fluid(flags, point, horizon, step);
    if (stationary->parsed()) return cmd_stationary(flags);
    if (ftsp->parsed()) return cmd_ftsp_pi(flags, point);
    if (sim->parsed()) return cmd_simulate(flags, n, point, horizon);
    for (const auto& [cmd, kind] : experiment_cmds) {
      if (cmd->parsed()) return run_and_report(load_config(flags, kind, true));
    }
    if (run_cmd->parsed()) {
      if (flags.config.empty()) throw Error(ErrorCode::kConfigParse, "--config is required");
      const auto kind = config_from_toml_file(flags.config).kind;
      return run_and_report(load_config(flags, kind, true));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
