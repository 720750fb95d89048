#include "xmodel/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "xmodel/ctmc.hpp"
#include "xmodel/error.hpp"
#include "xmodel/fluid.hpp"
#include "xmodel/format.hpp"
#include "xmodel/ftsp.hpp"
#include "xmodel/levy.hpp"
#include "xmodel/rng.hpp"

namespace xmodel {

namespace {

constexpr double kRegionTol = 1e-6;
constexpr std::uint64_t kFtspStream = 0x46545350;
constexpr std::size_t kLowSampleWarning = 30;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return out;
}

void require_overload(const ModelParams& p) {
  const auto failed = validate_overload(p);
  if (failed.empty()) return;
  std::string msg = "overload conditions violated:";
  for (const auto& f : failed) msg += " " + f;
  throw Error(ErrorCode::kOutsideRegime, msg);
}

void require_initial_region(const FluidState& x0, const ModelParams& p) {
  const auto region = classify_region(x0, p, kRegionTol);
  if (region == Region::kSMinus || region == Region::kBoundaryAMinus) {
    throw Error(ErrorCode::kOutsideRegime,
                "x0 must lie in A, A+ or S+, not " + std::string(to_string(region)));
  }
}

ComparisonReport new_report(const ExperimentConfig& cfg) {
  ComparisonReport r;
  r.kind = std::string(to_string(cfg.kind));
  r.seed = cfg.seed;
  return r;
}

void add_n_checks(ComparisonReport& report, const std::vector<double>& by_n,
                  const std::vector<std::int64_t>& n_list, const std::string& metric) {
  if (n_list.size() < 2) return;
  report.checks.push_back(make_check(metric + "_n" + std::to_string(n_list.back()) + "_below_n" +
                                         std::to_string(n_list.front()),
                                     by_n.back(), "<", by_n.front()));
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t master, std::int64_t n, std::size_t rep) {
  return derive_seed(master, static_cast<std::uint64_t>(n), rep);
}

ComparisonReport fluid_experiment(const ExperimentConfig& cfg) {
  Stopwatch clock;
  auto report = new_report(cfg);
  const auto x0 = cfg.initial_point();
  const auto traj = integrate(x0, cfg.params, cfg.T, cfg.h);
  report.timings.emplace_back("integrate", clock.seconds());

  Table path{"trajectory", {"t", "q1", "q2", "z12", "pi"}, {}};
  // Thin the output to the sample grid so files stay small at small h.
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.dt_sample / cfg.h)));
  for (std::size_t i = 0; i < traj.size(); i += stride) {
    const auto& s = traj.states[i];
    path.add_row({traj.time(i), s.q1, s.q2, s.z12, traj.pi_values[i]});
  }
  Table summary{"summary", {"T", "h", "distance_to_stationary", "time_to_1e-2", "time_to_1e-3"}, {}};
  const auto star = stationary_point(cfg.params);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  summary.add_row({cfg.T, cfg.h, l1_distance(traj.states.back(), star),
                   time_to_ball(traj, star, 1e-2).value_or(nan),
                   time_to_ball(traj, star, 1e-3).value_or(nan)});
  report.tables.push_back(std::move(summary));
  report.tables.push_back(std::move(path));
  return report;
}

ComparisonReport compare_fwlln(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const auto& p = cfg.params;
  require_overload(p);
  const auto x0 = cfg.initial_point();
  require_initial_region(x0, p);
  auto report = new_report(cfg);
  const auto ode = integrate(x0, p, cfg.T, cfg.h);
  report.timings.emplace_back("ode", clock.seconds());

  Table summary{"summary", {"n", "sup_error", "rep_sup_error_mean", "rep_sup_error_se", "events_mean"}, {}};
  Table mean_paths{"mean_paths", {"n", "t", "q1", "q2", "z12", "ode_q1", "ode_q2", "ode_z12"}, {}};
  std::vector<double> errors;
  for (const auto n : cfg.n_list) {
    Stopwatch n_clock;
    const auto inst = scaled_instance(p, n);
    const auto init = initial_state(inst, x0);
    std::vector<FluidState> sum;
    std::vector<double> times;
    std::vector<double> rep_errors;
    double events = 0.0;
    for (std::size_t r = 0; r < cfg.replications; ++r) {
      SimulateOptions opts;
      opts.dt_sample = cfg.dt_sample;
      const auto path = simulate(inst, init, cfg.T, replication_seed(cfg.seed, n, r), opts);
      const auto scaled = scale_path(path, n);
      if (sum.empty()) {
        sum.assign(scaled.trajectory.size(), FluidState{});
        times = path.times;
      }
      double rep_sup = 0.0;
      for (std::size_t i = 0; i < sum.size(); ++i) {
        const auto& s = scaled.trajectory.states[i];
        sum[i].q1 += s.q1;
        sum[i].q2 += s.q2;
        sum[i].z12 += s.z12;
        rep_sup = std::max(rep_sup, l1_distance(s, ode.state_at(times[i])));
      }
      rep_errors.push_back(rep_sup);
      events += static_cast<double>(path.event_count);
    }
    const double inv = 1.0 / static_cast<double>(cfg.replications);
    double sup = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      const FluidState mean{sum[i].q1 * inv, sum[i].q2 * inv, sum[i].z12 * inv};
      const auto fluid = ode.state_at(times[i]);
      sup = std::max(sup, l1_distance(mean, fluid));
      mean_paths.add_row({static_cast<double>(n), times[i], mean.q1, mean.q2, mean.z12, fluid.q1, fluid.q2,
                          fluid.z12});
    }
    const auto stats = mean_se(rep_errors);
    summary.add_row({static_cast<double>(n), sup, stats.mean, stats.se, events * inv});
    errors.push_back(sup);
    report.timings.emplace_back("n=" + std::to_string(n), n_clock.seconds());
  }
  add_n_checks(report, errors, cfg.n_list, "sup_error");
  report.checks.push_back(make_check("sup_error_n" + std::to_string(cfg.n_list.back()), errors.back(),
                                     "<=", cfg.thresholds.fwlln_max_error));
  report.tables.push_back(std::move(summary));
  report.tables.push_back(std::move(mean_paths));
  return report;
}

ComparisonReport ap_check(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const auto& p = cfg.params;
  require_overload(p);
  const auto x0 = cfg.initial_point();
  require_initial_region(x0, p);
  auto report = new_report(cfg);

  const double margin = std::min(0.1, cfg.t_check / 2.0);
  const auto ode = integrate(x0, p, cfg.t_check + margin, cfg.h);
  for (std::size_t i = 0; i < ode.size(); ++i) {
    if (std::abs(ode.time(i) - cfg.t_check) > margin) continue;
    if (classify_region(ode.states[i], p, kRegionTol) != Region::kBoundaryA) {
      throw Error(ErrorCode::kNotInA, "fluid solution leaves A near t_check = " + format_number(cfg.t_check));
    }
  }
  const auto gamma = ode.state_at(cfg.t_check);
  const auto ftsp = ftsp_stationary_distribution(gamma, p);
  const auto target = StepCdf::from_distribution(ftsp);
  report.timings.emplace_back("ode_and_qbd", clock.seconds());

  if (cfg.replications < kLowSampleWarning) {
    report.warnings.push_back("only " + std::to_string(cfg.replications) +
                              " replications; the empirical law is uninformative");
  }

  Table summary{"summary", {"n", "levy_distance", "empirical_p_positive", "pi_12", "atom_at_zero", "mean_d12"}, {}};
  Table empirical{"empirical_law", {"n", "value", "mass"}, {}};
  Table law{"ftsp_law", {"value", "mass"}, {}};
  for (std::size_t i = 0; i < ftsp.values.size(); ++i) {
    law.add_row({static_cast<double>(ftsp.values[i]) / static_cast<double>(ftsp.den), ftsp.mass[i]});
  }
  std::vector<double> distances;
  for (const auto n : cfg.n_list) {
    Stopwatch n_clock;
    const auto inst = scaled_instance(p, n);
    const auto init = initial_state(inst, x0);
    std::vector<std::int64_t> values;
    values.reserve(cfg.replications);
    SimulateOptions opts;
    opts.dt_sample = cfg.t_check;
    for (std::size_t r = 0; r < cfg.replications; ++r) {
      const auto path = simulate(inst, init, cfg.t_check, replication_seed(cfg.seed, n, r), opts);
      values.push_back(scaled_d12(path.final_state, inst));
    }
    const std::int64_t den = p.r12.den();
    const auto emp = StepCdf::from_lattice_samples(values, den);
    const double d = levy_distance(emp, target);
    double positive = 0.0;
    double mean = 0.0;
    for (const auto v : values) {
      positive += v > 0 ? 1.0 : 0.0;
      mean += static_cast<double>(v) / static_cast<double>(den);
    }
    const double inv = 1.0 / static_cast<double>(values.size());
    summary.add_row({static_cast<double>(n), d, positive * inv, ftsp.mass_positive(), ftsp.atom_at_zero, mean * inv});
    std::vector<std::int64_t> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      empirical.add_row({static_cast<double>(n), static_cast<double>(sorted[i]) / static_cast<double>(den),
                         static_cast<double>(j - i) * inv});
      i = j;
    }
    distances.push_back(d);
    report.timings.emplace_back("n=" + std::to_string(n), n_clock.seconds());
  }
  report.checks.push_back(make_check("levy_n" + std::to_string(cfg.n_list.back()), distances.back(), "<=",
                                     cfg.thresholds.ap_max_levy));
  report.tables.push_back(std::move(summary));
  report.tables.push_back(std::move(empirical));
  report.tables.push_back(std::move(law));
  return report;
}

ComparisonReport time_expansion_check(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  require_overload(p);
  const auto gamma = cfg.initial_point();
  if (classify_region(gamma, p, kRegionTol) != Region::kBoundaryA) {
    throw Error(ErrorCode::kNotInA, "time expansion needs a starting point in A");
  }
  auto report = new_report(cfg);
  if (cfg.replications < kLowSampleWarning) {
    report.warnings.push_back("only " + std::to_string(cfg.replications) + " replications");
  }
  const auto steps = static_cast<std::size_t>(std::floor(cfg.s_horizon / cfg.s_step + 1e-9));
  const auto rates = ftsp_rates(gamma, p);
  const std::int64_t den = p.r12.den();

  Table summary{"summary", {"n", "max_levy", "mean_levy"}, {}};
  Table by_s{"levy_by_s", {"n", "s", "levy_distance"}, {}};
  std::vector<double> maxima;
  std::vector<double> means;
  for (const auto n : cfg.n_list) {
    Stopwatch n_clock;
    const auto inst = scaled_instance(p, n);
    const auto init = initial_state(inst, gamma);
    const auto d0 = scaled_d12(init, inst);
    const double scale = static_cast<double>(n);
    std::vector<std::vector<std::int64_t>> ctmc(steps + 1);
    std::vector<std::vector<std::int64_t>> fast(steps + 1);
    SimulateOptions opts;
    opts.dt_sample = cfg.s_step / scale;
    for (std::size_t r = 0; r < cfg.replications; ++r) {
      const auto path = simulate(inst, init, cfg.s_horizon / scale, replication_seed(cfg.seed, n, r), opts);
      const auto diff = queue_difference(path, inst);
      const auto ref = simulate_ftsp(rates, p.r12, d0, cfg.s_horizon,
                                     derive_seed(cfg.seed ^ kFtspStream, static_cast<std::uint64_t>(n), r));
      for (std::size_t i = 0; i <= steps; ++i) {
        ctmc[i].push_back(diff.values[std::min(i, diff.values.size() - 1)]);
        fast[i].push_back(ref.value_at(static_cast<double>(i) * cfg.s_step));
      }
    }
    double worst = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      const double d = levy_distance(StepCdf::from_lattice_samples(ctmc[i], den),
                                     StepCdf::from_lattice_samples(fast[i], den));
      by_s.add_row({scale, static_cast<double>(i) * cfg.s_step, d});
      worst = std::max(worst, d);
      total += d;
    }
    const double mean = total / static_cast<double>(steps + 1);
    summary.add_row({scale, worst, mean});
    maxima.push_back(worst);
    means.push_back(mean);
    report.timings.emplace_back("n=" + std::to_string(n), n_clock.seconds());
  }
  report.checks.push_back(make_check("max_levy_n" + std::to_string(cfg.n_list.back()), maxima.back(), "<=",
                                     cfg.thresholds.expand_max_levy));
  if (cfg.n_list.size() >= 2) {
    report.checks.push_back(make_check("mean_levy_n" + std::to_string(cfg.n_list.back()) + "_not_above_n" +
                                           std::to_string(cfg.n_list.front()),
                                       means.back(), "<=", means.front()));
  }
  report.tables.push_back(std::move(summary));
  report.tables.push_back(std::move(by_s));
  return report;
}

ComparisonReport ssc_check(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const auto& p = cfg.params;
  require_overload(p);
  const auto x0 = cfg.initial_point();
  require_initial_region(x0, p);
  auto report = new_report(cfg);

  // Window [t1, t2]: the first stay of the fluid solution in A, entered at
  // t_enter, shortened by the settling time.
  const auto ode = integrate(x0, p, cfg.T, cfg.h);
  double t_enter = -1.0;
  double t2 = cfg.T;
  for (std::size_t i = 0; i < ode.size(); ++i) {
    const bool in_a = classify_region(ode.states[i], p, kRegionTol) == Region::kBoundaryA;
    if (t_enter < 0.0 && in_a) {
      t_enter = ode.time(i);
    } else if (t_enter >= 0.0 && !in_a) {
      t2 = ode.time(i);
      break;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double t1 = t_enter < 0.0 ? nan : t_enter + cfg.settle;
  const bool window = t_enter >= 0.0 && t1 < t2;
  if (!window) report.warnings.push_back("the fluid solution has no stay in A longer than the settling time");
  report.timings.emplace_back("ode", clock.seconds());

  Table summary{"summary",
                {"n", "t1", "t2", "not_collapsed_fraction", "not_collapsed_se", "z21_positive_fraction",
                 "queue_ratio_metric", "queue_ratio_metric_se"},
                {}};
  std::vector<double> collapsed_by_n;
  std::vector<double> z21_by_n;
  std::vector<double> metric_by_n;
  const auto& r = p.r12;
  for (const auto n : cfg.n_list) {
    Stopwatch n_clock;
    const auto inst = scaled_instance(p, n);
    const auto init = initial_state(inst, x0);
    const double log_n = std::log(static_cast<double>(n));
    const double norm = log_n * log_n * static_cast<double>(r.den());
    std::vector<double> not_collapsed;
    std::vector<double> z21_positive;
    std::vector<double> metric;
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      double sup = 0.0;
      double prev_t = 0.0;
      SystemState last = init;
      auto gap = [&](const SystemState& s) {
        return static_cast<double>(std::llabs(r.den() * s.q1 - r.num() * s.q2));
      };
      SimulateOptions opts;
      opts.dt_sample = cfg.dt_sample;
      if (window) {
        opts.observer = [&](double t, EventKind, const SystemState& s) {
          // `last` held on [prev_t, t).
          if (prev_t <= t2 && t > t1) sup = std::max(sup, gap(last));
          last = s;
          prev_t = t;
        };
      }
      const auto path = simulate(inst, init, cfg.T, replication_seed(cfg.seed, n, rep), opts);
      if (window && prev_t <= t2) sup = std::max(sup, gap(last));
      std::size_t bad = 0;
      std::size_t z21 = 0;
      for (const auto& s : path.states) {
        if (s.z21 > 0) ++z21;
        if (s.z21 > 0 || s.z11 + s.z21 < inst.m1_n || s.z12 + s.z22 < inst.m2_n) ++bad;
      }
      const double samples = static_cast<double>(path.states.size());
      not_collapsed.push_back(static_cast<double>(bad) / samples);
      z21_positive.push_back(static_cast<double>(z21) / samples);
      metric.push_back(window ? sup / norm : nan);
    }
    const auto a = mean_se(not_collapsed);
    const auto z = mean_se(z21_positive);
    const auto b = mean_se(metric);
    summary.add_row({static_cast<double>(n), t1, t2, a.mean, a.se, z.mean, b.mean, b.se});
    collapsed_by_n.push_back(1.0 - a.mean);
    z21_by_n.push_back(z.mean);
    metric_by_n.push_back(b.mean);
    report.timings.emplace_back("n=" + std::to_string(n), n_clock.seconds());
  }
  const auto n_max = std::to_string(cfg.n_list.back());
  report.checks.push_back(
      make_check("collapsed_fraction_n" + n_max, collapsed_by_n.back(), ">=", cfg.thresholds.ssc_min_collapsed));
  report.checks.push_back(make_check("z21_positive_fraction_n" + n_max, z21_by_n.back(), "==", 0.0));
  add_n_checks(report, metric_by_n, cfg.n_list, "queue_ratio_metric");
  report.tables.push_back(std::move(summary));
  return report;
}

ComparisonReport steady_state_check(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  require_overload(p);
  const auto x0 = cfg.initial_point();
  require_initial_region(x0, p);
  auto report = new_report(cfg);
  const double burn_in = cfg.burn_in_time();
  const double t_end = cfg.T_long;
  const auto star = embed6(stationary_point(p), p);
  const double star6[] = {star.q1, star.q2, star.z11, star.z12, star.z21, star.z22};

  Table summary{"summary",
                {"n", "q1", "q2", "z11", "z12", "z21", "z22", "deviation", "deviation_se"}, {}};
  std::vector<double> deviations;
  for (const auto n : cfg.n_list) {
    Stopwatch n_clock;
    const auto inst = scaled_instance(p, n);
    const auto init = initial_state(inst, x0);
    double avg[6] = {0, 0, 0, 0, 0, 0};
    std::vector<double> rep_dev;
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      double integral[6] = {0, 0, 0, 0, 0, 0};
      double prev_t = 0.0;
      SystemState last = init;
      auto accumulate = [&](double until) {
        const double dt = std::min(until, t_end) - std::max(prev_t, burn_in);
        if (dt <= 0.0) return;
        const double v[] = {static_cast<double>(last.q1), static_cast<double>(last.q2),
                            static_cast<double>(last.z11), static_cast<double>(last.z12),
                            static_cast<double>(last.z21), static_cast<double>(last.z22)};
        for (int k = 0; k < 6; ++k) integral[k] += v[k] * dt;
      };
      SimulateOptions opts;
      opts.dt_sample = t_end;
      opts.observer = [&](double t, EventKind, const SystemState& s) {
        accumulate(t);
        last = s;
        prev_t = t;
      };
      simulate(inst, init, t_end, replication_seed(cfg.seed, n, rep), opts);
      accumulate(t_end);
      const double scale = 1.0 / ((t_end - burn_in) * static_cast<double>(n));
      double dev = 0.0;
      for (int k = 0; k < 6; ++k) {
        const double a = integral[k] * scale;
        avg[k] += a;
        dev += std::abs(a - star6[k]);
      }
      rep_dev.push_back(dev);
    }
    const double inv = 1.0 / static_cast<double>(cfg.replications);
    double deviation = 0.0;
    for (int k = 0; k < 6; ++k) {
      avg[k] *= inv;
      deviation += std::abs(avg[k] - star6[k]);
    }
    const auto stats = mean_se(rep_dev);
    summary.add_row({static_cast<double>(n), avg[0], avg[1], avg[2], avg[3], avg[4], avg[5], deviation, stats.se});
    deviations.push_back(deviation);
    report.timings.emplace_back("n=" + std::to_string(n), n_clock.seconds());
  }
  report.checks.push_back(make_check("deviation_n" + std::to_string(cfg.n_list.back()), deviations.back(), "<=",
                                     cfg.thresholds.steady_max_deviation));
  add_n_checks(report, deviations, cfg.n_list, "deviation");
  report.tables.push_back(std::move(summary));
  return report;
}

ComparisonReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::kFluid: return fluid_experiment(cfg);
    case ExperimentKind::kFwlln: return compare_fwlln(cfg);
    case ExperimentKind::kAp: return ap_check(cfg);
    case ExperimentKind::kExpand: return time_expansion_check(cfg);
    case ExperimentKind::kSsc: return ssc_check(cfg);
    case ExperimentKind::kSteady: return steady_state_check(cfg);
  }
  throw Error(ErrorCode::kConfigParse, "unknown experiment kind");
}

RunResult run(const std::filesystem::path& config_path) {
  const auto cfg = config_from_toml_file(config_path);
  RunResult out;
  out.report = run_experiment(cfg);
  out.files = write_report(out.report, cfg.output_dir, cfg.format);
  return out;
}

}  // namespace xmodel
