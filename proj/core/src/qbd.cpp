#include "xmodel/qbd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "xmodel/error.hpp"

namespace xmodel {

std::int64_t QbdBlocks::value(std::int64_t level, int phase) const noexcept {
  if (phase < m) return level * m + 1 + phase;
  return -(level * m + (phase - m));
}

std::pair<std::int64_t, int> QbdBlocks::locate(std::int64_t v) const noexcept {
  if (v > 0) return {(v - 1) / m, static_cast<int>((v - 1) % m)};
  const std::int64_t u = -v;
  return {u / m, m + static_cast<int>(u % m)};
}

QbdBlocks build_qbd(const FtspRates& rates, Ratio ratio) {
  QbdBlocks b;
  const std::int64_t j = ratio.num();
  const std::int64_t k = ratio.den();
  b.ratio = ratio;
  b.m = static_cast<int>(std::max(j, k));
  const int n = b.phases();
  b.B = Eigen::MatrixXd::Zero(n, n);
  b.A0 = Eigen::MatrixXd::Zero(n, n);
  b.A1 = Eigen::MatrixXd::Zero(n, n);
  b.A2 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd up_from_one = Eigen::MatrixXd::Zero(n, n);

  b.phase_map.resize(static_cast<std::size_t>(n));
  for (int ph = 0; ph < n; ++ph) b.phase_map[static_cast<std::size_t>(ph)] = b.value(0, ph);

  for (std::int64_t level = 0; level <= 1; ++level) {
    for (int ph = 0; ph < n; ++ph) {
      const std::int64_t v = b.value(level, ph);
      const bool plus = v > 0;
      const std::pair<std::int64_t, double> jumps[] = {
          {+k, plus ? rates.lam1_plus : rates.lam1_minus},
          {-k, plus ? rates.mu1_plus : rates.mu1_minus},
          {+j, plus ? rates.lamR_plus : rates.lamR_minus},
          {-j, plus ? rates.muR_plus : rates.muR_minus},
      };
      double out = 0.0;
      for (const auto& [step, rate] : jumps) {
        if (rate == 0.0) continue;
        out += rate;
        const auto [to_level, to_phase] = b.locate(v + step);
        const auto diff = to_level - level;
        Eigen::MatrixXd* target = nullptr;
        if (level == 0) {
          target = diff == 0 ? &b.B : &b.A0;
        } else {
          target = diff < 0 ? &b.A2 : (diff == 0 ? &b.A1 : &up_from_one);
        }
        (*target)(ph, to_phase) += rate;
      }
      (level == 0 ? b.B : b.A1)(ph, ph) -= out;
    }
  }
  if (!(up_from_one - b.A0).isZero(0.0)) {
    throw std::logic_error("QBD level structure is not homogeneous above level 0");
  }
  return b;
}

QbdBlocks build_qbd(const FluidState& gamma, const ModelParams& p) {
  return build_qbd(ftsp_rates(gamma, p), p.r12);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double rate_residual(const QbdBlocks& blocks, const Eigen::MatrixXd& R) {
  return (blocks.A0 + R * blocks.A1 + R * R * blocks.A2).cwiseAbs().maxCoeff();
}

namespace {

RateMatrixResult functional_iteration(const QbdBlocks& blocks, const SolveOptions& options) {
  const int n = blocks.phases();
  RateMatrixResult out;
  out.R = options.warm_start && options.warm_start->rows() == n && options.warm_start->cols() == n
              ? *options.warm_start
              : Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd a1_inv = blocks.A1.inverse();
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    Eigen::MatrixXd next = -(blocks.A0 + out.R * out.R * blocks.A2) * a1_inv;
    // Residual of the current iterate equals (R_s - R_{s+1}) A1.
    const double step_residual = ((out.R - next) * blocks.A1).cwiseAbs().maxCoeff();
    out.R = std::move(next);
    out.iterations = it + 1;
    if (step_residual <= options.tol) {
      out.residual = rate_residual(blocks, out.R);
      if (out.residual <= options.tol) {
        out.converged = true;
        return out;
      }
    }
  }
  out.residual = rate_residual(blocks, out.R);
  out.converged = out.residual <= options.tol;
  return out;
}

RateMatrixResult logarithmic_reduction(const QbdBlocks& blocks, const SolveOptions& options) {
  const int n = blocks.phases();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd neg_a1_inv = (-blocks.A1).inverse();
  Eigen::MatrixXd up = neg_a1_inv * blocks.A0;
  Eigen::MatrixXd down = neg_a1_inv * blocks.A2;
  Eigen::MatrixXd G = down;
  Eigen::MatrixXd T = up;
  RateMatrixResult out;
  constexpr std::size_t kMaxDoublings = 128;
  for (std::size_t it = 0; it < std::min(options.max_iter, kMaxDoublings); ++it) {
    const Eigen::MatrixXd U = up * down + down * up;
    const Eigen::MatrixXd inv = (id - U).inverse();
    up = inv * (up * up);
    down = inv * (down * down);
    const Eigen::MatrixXd inc = T * down;
    G += inc;
    T = T * up;
    out.iterations = it + 1;
    if (inc.cwiseAbs().maxCoeff() <= 1e-17 || T.cwiseAbs().maxCoeff() <= 1e-300) break;
  }
  out.R = blocks.A0 * (-(blocks.A1 + blocks.A0 * G)).inverse();
  out.residual = rate_residual(blocks, out.R);
  out.converged = out.residual <= options.tol;
  return out;
}

}  // namespace

RateMatrixResult compute_rate_matrix(const QbdBlocks& blocks, const SolveOptions& options) {
  if (options.algorithm == RateAlgorithm::kFunctionalIteration) {
    return functional_iteration(blocks, options);
  }
  auto out = logarithmic_reduction(blocks, options);
  if (!out.converged) {
    // Polish with a few fixed-point sweeps started from the reduction result.
    SolveOptions polish = options;
    polish.algorithm = RateAlgorithm::kFunctionalIteration;
    polish.warm_start = out.R;
    polish.max_iter = std::min<std::size_t>(options.max_iter, 10'000);
    auto polished = functional_iteration(blocks, polish);
    polished.iterations += out.iterations;
    if (polished.residual < out.residual) out = std::move(polished);
  }
  return out;
}

QbdSolution solve_rate_matrix(const QbdBlocks& blocks, const SolveOptions& options) {
  auto rate = compute_rate_matrix(blocks, options);
  if (!rate.converged) {
    throw Error(ErrorCode::kNonConverged,
                "rate matrix residual " + std::to_string(rate.residual) + " after " +
                    std::to_string(rate.iterations) + " iterations");
  }
  const int n = blocks.phases();
  QbdSolution sol;
  sol.R = std::move(rate.R);
  sol.residual = rate.residual;
  sol.iterations = rate.iterations;
  sol.algorithm = options.algorithm;
  sol.spectral_radius_R = spectral_radius(sol.R);
  if (!(sol.spectral_radius_R < 1.0 - 1e-12)) {
    throw Error(ErrorCode::kNotRecurrent,
                "spectral radius of R is " + std::to_string(sol.spectral_radius_R));
  }

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd level_sum = (id - sol.R).inverse();
  const Eigen::VectorXd total = level_sum * Eigen::VectorXd::Ones(n);

  Eigen::MatrixXd system = (blocks.B + sol.R * blocks.A2).transpose();
  system.row(n - 1) = total.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-12);
  if (lu.rank() < n) {
    throw Error(ErrorCode::kSingularBoundary,
                "boundary system has rank " + std::to_string(lu.rank()) + " < " + std::to_string(n));
  }
  Eigen::VectorXd alpha = lu.solve(rhs);
  if ((system * alpha - rhs).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::kSingularBoundary, "boundary solve is inaccurate");
  }
  for (int i = 0; i < n; ++i) {
    if (alpha(i) < -1e-12) {
      throw Error(ErrorCode::kSingularBoundary, "boundary probability is negative");
    }
    alpha(i) = std::max(alpha(i), 0.0);
  }
  sol.alpha0 = alpha.transpose();

  const Eigen::RowVectorXd mass_by_phase = sol.alpha0 * level_sum;
  sol.pi_positive = mass_by_phase.head(blocks.m).sum();
  sol.atom_at_zero = sol.alpha0(blocks.m);
  return sol;
}

namespace {

double side_margin(const QbdBlocks& blocks, int first, int count) {
  const Eigen::MatrixXd generator = blocks.A0 + blocks.A1 + blocks.A2;
  Eigen::MatrixXd sub = generator.block(first, first, count, count);
  Eigen::MatrixXd system = sub.transpose();
  system.row(count - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count);
  rhs(count - 1) = 1.0;
  const Eigen::VectorXd nu = system.fullPivLu().solve(rhs);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(blocks.phases());
  const Eigen::VectorXd outward = blocks.A0.middleRows(first, count) * ones;
  const Eigen::VectorXd inward = blocks.A2.middleRows(first, count) * ones;
  return nu.dot(inward) - nu.dot(outward);
}

}  // namespace

MeanDriftMargins mean_drift_margins(const QbdBlocks& blocks) {
  return {side_margin(blocks, 0, blocks.m), side_margin(blocks, blocks.m, blocks.m)};
}

bool qbd_positive_recurrent(const QbdBlocks& blocks, const FtspRates& rates) {
  const auto drift = drift_pair(rates, blocks.ratio);
  const bool by_drift = drift.minus > 0.0 && drift.plus < 0.0;
  const auto margins = mean_drift_margins(blocks);
  if (margins.recurrent() != by_drift) {
    const double scale = blocks.A1.diagonal().cwiseAbs().maxCoeff() + 1.0;
    const double slack = 1e-10 * scale;
    const bool ambiguous = std::abs(drift.minus) <= slack || std::abs(drift.plus) <= slack ||
                           std::abs(margins.positive_side) <= slack ||
                           std::abs(margins.negative_side) <= slack;
    if (!ambiguous) {
      throw Error(ErrorCode::kDriftTestMismatch,
                  "drift test says " + std::string(by_drift ? "recurrent" : "not recurrent") +
                      " but the mean-drift test disagrees");
    }
  }
  return by_drift;
}

bool qbd_positive_recurrent(const QbdBlocks& blocks, const FluidState& gamma, const ModelParams& p) {
  return qbd_positive_recurrent(blocks, ftsp_rates(gamma, p));
}

}  // namespace xmodel
