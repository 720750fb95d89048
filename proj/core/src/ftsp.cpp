#include "xmodel/ftsp.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "xmodel/error.hpp"
#include "xmodel/format.hpp"
#include "xmodel/rng.hpp"

namespace xmodel {

FtspStationary solve_ftsp(const FluidState& gamma, const ModelParams& p, const SolveOptions& options) {
  const auto region = classify_region(gamma, p);
  if (region != Region::kBoundaryA) {
    throw Error(ErrorCode::kNotRecurrent,
                "FTSP is not positive recurrent in region " + std::string(to_string(region)));
  }
  FtspStationary out{build_qbd(gamma, p), {}};
  out.solution = solve_rate_matrix(out.blocks, options);
  return out;
}

double pi_12(const FluidState& gamma, const ModelParams& p, const PiOptions& options) {
  switch (classify_region(gamma, p, options.boundary_tol)) {
    case Region::kSPlus:
    case Region::kBoundaryAPlus:
      return 1.0;
    case Region::kSMinus:
    case Region::kBoundaryAMinus:
      return 0.0;
    case Region::kBoundaryA:
      break;
  }
  const auto blocks = build_qbd(gamma, p);
  return solve_rate_matrix(blocks, options.solver).pi_positive;
}

double FtspDistribution::total_mass() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

double FtspDistribution::mass_positive() const {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0) total += mass[i];
  }
  return total;
}

void FtspDistribution::write_csv(std::ostream& out) const {
  out << "value,mass\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_number(static_cast<double>(values[i]) / static_cast<double>(den)) << ','
        << format_number(mass[i]) << '\n';
  }
}

FtspDistribution expand_distribution(const QbdBlocks& blocks, const QbdSolution& solution,
                                     double tail_epsilon) {
  std::vector<std::pair<std::int64_t, double>> entries;
  Eigen::RowVectorXd level_mass = solution.alpha0;
  double cumulative = 0.0;
  constexpr std::int64_t kMaxLevels = 10'000'000;
  for (std::int64_t level = 0; level < kMaxLevels; ++level) {
    for (int ph = 0; ph < blocks.phases(); ++ph) {
      entries.emplace_back(blocks.value(level, ph), level_mass(ph));
    }
    const double this_level = level_mass.sum();
    cumulative += this_level;
    if (1.0 - cumulative < tail_epsilon || this_level < 1e-6 * tail_epsilon) break;
    level_mass = level_mass * solution.R;
  }
  std::sort(entries.begin(), entries.end());
  FtspDistribution dist;
  dist.den = blocks.ratio.den();
  dist.atom_at_zero = solution.atom_at_zero;
  dist.values.reserve(entries.size());
  dist.mass.reserve(entries.size());
  for (const auto& [v, m] : entries) {
    dist.values.push_back(v);
    dist.mass.push_back(m);
  }
  return dist;
}

FtspDistribution ftsp_stationary_distribution(const FluidState& gamma, const ModelParams& p,
                                              double tail_epsilon) {
  const auto stationary = solve_ftsp(gamma, p);
  return expand_distribution(stationary.blocks, stationary.solution, tail_epsilon);
}

std::int64_t FtspPath::value_at(double s) const {
  const auto it = std::upper_bound(times.begin(), times.end(), s);
  if (it == times.begin()) return values.front();
  return values[static_cast<std::size_t>(std::distance(times.begin(), it) - 1)];
}

namespace {

// Time at values > 0 within [a, b].
double positive_time(const FtspPath& path, double a, double b) {
  double total = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double start = std::max(path.times[i], a);
    const double end = std::min(i + 1 < path.times.size() ? path.times[i + 1] : path.horizon, b);
    if (end > start && path.values[i] > 0) total += end - start;
  }
  return total;
}

}  // namespace

double FtspPath::fraction_positive() const {
  return horizon > 0.0 ? positive_time(*this, 0.0, horizon) / horizon : 0.0;
}

std::vector<double> FtspPath::batch_fractions_positive(std::size_t batches) const {
  std::vector<double> out;
  if (batches == 0 || horizon <= 0.0) return out;
  const double width = horizon / static_cast<double>(batches);
  // Single sweep over the path; batches are contiguous.
  out.assign(batches, 0.0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] <= 0) continue;
    double start = times[i];
    const double end = std::min(i + 1 < times.size() ? times[i + 1] : horizon, horizon);
    while (start < end) {
      auto b = static_cast<std::size_t>(start / width);
      if (b >= batches) break;
      const double edge = std::min(end, static_cast<double>(b + 1) * width);
      out[b] += edge - start;
      start = edge;
    }
  }
  for (auto& v : out) v /= width;
  return out;
}

FtspPath simulate_ftsp(const FtspRates& rates, Ratio ratio, std::int64_t d0, double horizon,
                       std::uint64_t seed) {
  FtspPath path;
  path.den = ratio.den();
  path.horizon = horizon;
  path.times.push_back(0.0);
  path.values.push_back(d0);
  const std::int64_t j = ratio.num();
  const std::int64_t k = ratio.den();
  CounterRng rng(derive_seed(seed, 0x46545350));
  double t = 0.0;
  std::int64_t v = d0;
  while (true) {
    const bool plus = v > 0;
    const double up1 = plus ? rates.lam1_plus : rates.lam1_minus;
    const double down1 = plus ? rates.mu1_plus : rates.mu1_minus;
    const double upR = plus ? rates.lamR_plus : rates.lamR_minus;
    const double downR = plus ? rates.muR_plus : rates.muR_minus;
    const double total = up1 + down1 + upR + downR;
    if (!(total > 0.0)) break;  // absorbing: no jump on this side
    t += rng.exponential() / total;
    if (t > horizon) break;
    const double u = rng.uniform() * total;
    if (u < up1) {
      v += k;
    } else if (u < up1 + down1) {
      v -= k;
    } else if (u < up1 + down1 + upR) {
      v += j;
    } else {
      v -= j;
    }
    path.times.push_back(t);
    path.values.push_back(v);
  }
  return path;
}

FtspPath simulate_ftsp(const FluidState& gamma, const ModelParams& p, std::int64_t d0,
                       double horizon, std::uint64_t seed) {
  return simulate_ftsp(ftsp_rates(gamma, p), p.r12, d0, horizon, seed);
}

FrozenFtsp frozen_as_ftsp(const ScaledInstance& inst, const SystemState& state) {
  const double n = static_cast<double>(inst.n);
  FrozenFtsp out;
  out.params = inst.params;
  out.params.lambda1 = static_cast<double>(inst.lambda1_n) / n;
  out.params.lambda2 = static_cast<double>(inst.lambda2_n) / n;
  out.params.m1 = static_cast<double>(inst.m1_n) / n;
  out.params.m2 = static_cast<double>(inst.m2_n) / n;
  out.gamma = {static_cast<double>(state.q1) / n, static_cast<double>(state.q2) / n,
               static_cast<double>(state.z12) / n};
  out.time_scale = n;
  return out;
}

}  // namespace xmodel
