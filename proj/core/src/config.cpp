#include "xmodel/config.hpp"

#include <fstream>
#include <sstream>

#include "toml_util.hpp"
#include "xmodel/error.hpp"
#include "xmodel/params_io.hpp"

namespace xmodel {

namespace {

constexpr std::string_view kContext = "config";

struct KindName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::kFluid, "fluid"}, {ExperimentKind::kFwlln, "fwlln"},
    {ExperimentKind::kAp, "ap"},       {ExperimentKind::kExpand, "expand"},
    {ExperimentKind::kSsc, "ssc"},     {ExperimentKind::kSteady, "steady"},
};

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (const auto& k : kKinds) {
    if (k.name == text) return k.kind;
  }
  throw Error(ErrorCode::kConfigParse, "unknown experiment kind '" + std::string(text) + "'");
}

FluidState ExperimentConfig::initial_point() const { return x0 ? *x0 : stationary_point(params); }

ExperimentConfig config_from_toml(std::string_view text) {
  using namespace detail;
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    config_error(kContext, std::string(e.description()));
  }
  reject_unknown_keys(root,
                      {"kind", "seed", "output_dir", "format", "params", "x0", "n_list",
                       "replications", "T", "h", "dt_sample", "t_check", "s_horizon", "s_step",
                       "T_long", "burn_in", "settle", "thresholds"},
                      kContext);

  ExperimentConfig cfg;
  try {
    cfg.kind = parse_experiment_kind(string_at(root, "kind", kContext));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfigParse) throw;
    config_error(kContext, std::string("key 'kind': ") + e.detail());
  }
  if (root.contains("seed")) {
    const auto seed = integer_at(root, "seed", kContext);
    if (seed < 0) config_error(kContext, "key 'seed' must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (root.contains("output_dir")) cfg.output_dir = string_at(root, "output_dir", kContext);
  if (root.contains("format")) {
    const auto format = string_at(root, "format", kContext);
    if (format != "csv" && format != "json") config_error(kContext, "key 'format' must be csv or json");
    cfg.format = parse_output_format(format);
  }
  if (const auto* node = root.get("params")) {
    const auto* table = node->as_table();
    if (table == nullptr) config_error(kContext, "key 'params' must be a table");
    cfg.params = params_from_table(*table, "config.params");
  }
  if (const auto* node = root.get("x0")) {
    if (auto s = node->value_exact<std::string>()) {
      if (*s != "stationary") config_error(kContext, "key 'x0' must be [q1, q2, z12] or \"stationary\"");
    } else {
      const auto v = number_array_at(root, "x0", kContext);
      if (v.size() != 3) config_error(kContext, "key 'x0' must have three entries");
      cfg.x0 = FluidState{v[0], v[1], v[2]};
      if (!in_state_space(*cfg.x0, cfg.params)) config_error(kContext, "key 'x0' lies outside the state space");
    }
  }
  if (root.contains("n_list")) {
    const auto* array = root.get("n_list")->as_array();
    if (array == nullptr) config_error(kContext, "key 'n_list' must be an array");
    cfg.n_list.clear();
    for (const auto& e : *array) {
      const auto v = e.value_exact<std::int64_t>();
      if (!v || *v < 1) config_error(kContext, "key 'n_list' must hold positive integers");
      cfg.n_list.push_back(*v);
    }
  }
  if (cfg.n_list.empty()) config_error(kContext, "key 'n_list' must not be empty");
  for (std::size_t i = 1; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] <= cfg.n_list[i - 1]) config_error(kContext, "key 'n_list' must be ascending");
  }
  if (root.contains("replications")) {
    const auto reps = integer_at(root, "replications", kContext);
    if (reps < 1) config_error(kContext, "key 'replications' must be at least 1");
    cfg.replications = static_cast<std::size_t>(reps);
  }
  auto positive = [&](std::string_view key, double& field) {
    if (!root.contains(key)) return;
    field = number_at(root, key, kContext);
    if (!(field > 0.0)) config_error(kContext, "key '" + std::string(key) + "' must be positive");
  };
  positive("T", cfg.T);
  positive("h", cfg.h);
  positive("dt_sample", cfg.dt_sample);
  positive("t_check", cfg.t_check);
  positive("s_horizon", cfg.s_horizon);
  positive("s_step", cfg.s_step);
  positive("T_long", cfg.T_long);
  if (root.contains("burn_in")) {
    cfg.burn_in = number_at(root, "burn_in", kContext);
    if (*cfg.burn_in < 0.0 || *cfg.burn_in >= cfg.T_long) {
      config_error(kContext, "key 'burn_in' must lie in [0, T_long)");
    }
  }
  if (root.contains("settle")) {
    cfg.settle = number_at(root, "settle", kContext);
    if (cfg.settle < 0.0) config_error(kContext, "key 'settle' must be nonnegative");
  }
  if (const auto* node = root.get("thresholds")) {
    const auto* table = node->as_table();
    if (table == nullptr) config_error(kContext, "key 'thresholds' must be a table");
    constexpr std::string_view ctx = "config.thresholds";
    reject_unknown_keys(*table,
                        {"fwlln_max_error", "ap_max_levy", "expand_max_levy", "ssc_min_collapsed",
                         "steady_max_deviation"},
                        ctx);
    auto& th = cfg.thresholds;
    if (table->contains("fwlln_max_error")) th.fwlln_max_error = number_at(*table, "fwlln_max_error", ctx);
    if (table->contains("ap_max_levy")) th.ap_max_levy = number_at(*table, "ap_max_levy", ctx);
    if (table->contains("expand_max_levy")) th.expand_max_levy = number_at(*table, "expand_max_levy", ctx);
    if (table->contains("ssc_min_collapsed")) {
      th.ssc_min_collapsed = number_at(*table, "ssc_min_collapsed", ctx);
    }
    if (table->contains("steady_max_deviation")) {
      th.steady_max_deviation = number_at(*table, "steady_max_deviation", ctx);
    }
  }
  return cfg;
}

ExperimentConfig config_from_toml_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return config_from_toml(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string config_to_toml(const ExperimentConfig& cfg) {
  using detail::shortest_double;
  std::ostringstream out;
  out << "kind = \"" << to_string(cfg.kind) << "\"\n"
      << "seed = " << cfg.seed << "\n"
      << "output_dir = \"" << cfg.output_dir << "\"\n"
      << "format = \"" << (cfg.format == OutputFormat::kCsv ? "csv" : "json") << "\"\n";
  if (cfg.x0) {
    out << "x0 = [" << shortest_double(cfg.x0->q1) << ", " << shortest_double(cfg.x0->q2) << ", "
        << shortest_double(cfg.x0->z12) << "]\n";
  } else {
    out << "x0 = \"stationary\"\n";
  }
  out << "n_list = [";
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) out << (i ? ", " : "") << cfg.n_list[i];
  out << "]\n"
      << "replications = " << cfg.replications << "\n"
      << "T = " << shortest_double(cfg.T) << "\n"
      << "h = " << shortest_double(cfg.h) << "\n"
      << "dt_sample = " << shortest_double(cfg.dt_sample) << "\n"
      << "t_check = " << shortest_double(cfg.t_check) << "\n"
      << "s_horizon = " << shortest_double(cfg.s_horizon) << "\n"
      << "s_step = " << shortest_double(cfg.s_step) << "\n"
      << "T_long = " << shortest_double(cfg.T_long) << "\n";
  if (cfg.burn_in) out << "burn_in = " << shortest_double(*cfg.burn_in) << "\n";
  out << "settle = " << shortest_double(cfg.settle) << "\n"
      << "\n[params]\n"
      << params_to_toml(cfg.params) << "\n[thresholds]\n"
      << "fwlln_max_error = " << shortest_double(cfg.thresholds.fwlln_max_error) << "\n"
      << "ap_max_levy = " << shortest_double(cfg.thresholds.ap_max_levy) << "\n"
      << "expand_max_levy = " << shortest_double(cfg.thresholds.expand_max_levy) << "\n"
      << "ssc_min_collapsed = " << shortest_double(cfg.thresholds.ssc_min_collapsed) << "\n"
      << "steady_max_deviation = " << shortest_double(cfg.thresholds.steady_max_deviation) << "\n";
  return out.str();
}

}  // namespace xmodel
