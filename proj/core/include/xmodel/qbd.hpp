#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xmodel/model.hpp"
#include "xmodel/rational.hpp"

namespace xmodel {

/// Level-structured generator of the fast-time-scale process.
///
/// The queue difference is multiplied by the ratio denominator k so that
/// jumps become the integers {+-j, +-k} (r12 = j/k). With m = max(j, k),
/// level i collects the positive values {i*m+1, ..., (i+1)*m} and the
/// non-positive values {-(i+1)*m+1, ..., -i*m}; no jump skips a level and
/// rates depend only on the sign, so levels >= 1 are homogeneous.
///
/// Phases 0..m-1 are the positive values of a level in increasing order,
/// phases m..2m-1 the non-positive values in decreasing order (phase m of
/// level 0 is the value 0).
struct QbdBlocks {
  int m = 1;
  Ratio ratio{1, 1};
  Eigen::MatrixXd B;   ///< within level 0
  Eigen::MatrixXd A0;  ///< level i -> i+1
  Eigen::MatrixXd A1;  ///< within level i >= 1
  Eigen::MatrixXd A2;  ///< level i -> i-1
  std::vector<std::int64_t> phase_map;  ///< lattice value of each phase at level 0

  int phases() const noexcept { return 2 * m; }
  bool positive_phase(int phase) const noexcept { return phase < m; }
  std::int64_t value(std::int64_t level, int phase) const noexcept;
  std::pair<std::int64_t, int> locate(std::int64_t value) const noexcept;
};

QbdBlocks build_qbd(const FtspRates& rates, Ratio ratio);
QbdBlocks build_qbd(const FluidState& gamma, const ModelParams& p);

enum class RateAlgorithm {
  kLogarithmicReduction,
  kFunctionalIteration,
};

struct SolveOptions {
  RateAlgorithm algorithm = RateAlgorithm::kLogarithmicReduction;
  double tol = 1e-13;
  std::size_t max_iter = 1'000'000;
  /// Initial iterate for functional iteration; zero matrix when empty.
  std::optional<Eigen::MatrixXd> warm_start;
};

struct QbdSolution {
  Eigen::MatrixXd R;
  Eigen::RowVectorXd alpha0;
  double pi_positive = 0.0;    ///< P(difference > 0)
  double atom_at_zero = 0.0;   ///< P(difference == 0)
  double spectral_radius_R = 0.0;
  double residual = 0.0;       ///< max-norm of A0 + R A1 + R^2 A2
  std::size_t iterations = 0;
  RateAlgorithm algorithm = RateAlgorithm::kLogarithmicReduction;
};

/// Minimal nonnegative rate matrix R and boundary row alpha0 with
/// alpha0 (B + R A2) = 0, alpha0 (I - R)^{-1} 1 = 1. Throws
/// Error(kNonConverged) or Error(kSingularBoundary).
QbdSolution solve_rate_matrix(const QbdBlocks& blocks, const SolveOptions& options = {});

/// Only the R computation of solve_rate_matrix, without the boundary solve.
/// Returns the matrix, the residual and the iteration count.
struct RateMatrixResult {
  Eigen::MatrixXd R;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};
RateMatrixResult compute_rate_matrix(const QbdBlocks& blocks, const SolveOptions& options = {});

double spectral_radius(const Eigen::MatrixXd& m);
double rate_residual(const QbdBlocks& blocks, const Eigen::MatrixXd& R);

/// Per-side margins (inward minus outward level-crossing rate under the
/// phase-stationary law). A0 + A1 + A2 splits into two closed classes, the
/// positive and the non-positive phases; the QBD is positive recurrent iff
/// both margins are positive.
struct MeanDriftMargins {
  double positive_side = 0.0;
  double negative_side = 0.0;
  bool recurrent() const noexcept { return positive_side > 0.0 && negative_side > 0.0; }
};
MeanDriftMargins mean_drift_margins(const QbdBlocks& blocks);

/// Drift criterion delta_minus > 0 > delta_plus, cross-checked against the
/// mean-drift test on the blocks. Throws Error(kDriftTestMismatch) when the
/// two disagree by more than round-off.
bool qbd_positive_recurrent(const QbdBlocks& blocks, const FtspRates& rates);
bool qbd_positive_recurrent(const QbdBlocks& blocks, const FluidState& gamma, const ModelParams& p);

}  // namespace xmodel
