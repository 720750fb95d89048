#pragma once

#include <cstdint>
#include <vector>

#include "xmodel/ftsp.hpp"

namespace xmodel {

/// Right-continuous step distribution function with finitely many atoms.
/// Mass may also sit at -infinity or +infinity (a defective law):
/// F(-inf) = mass_minus_inf and F(+inf) = mass_minus_inf + sum of masses,
/// so whatever is missing from 1 sits at +infinity.
class StepCdf {
 public:
  StepCdf() = default;
  /// Atoms need not be sorted or distinct.
  StepCdf(std::vector<double> points, std::vector<double> masses, double mass_minus_inf = 0.0);

  /// Empirical law, each sample weighted 1/size.
  static StepCdf from_samples(const std::vector<double>& samples);
  /// Empirical law of lattice values v/den.
  static StepCdf from_lattice_samples(const std::vector<std::int64_t>& values, std::int64_t den);
  /// Lattice values rescaled by 1/den.
  static StepCdf from_distribution(const FtspDistribution& dist);

  double operator()(double x) const;
  double lower_limit() const noexcept { return mass_minus_inf_; }
  double upper_limit() const noexcept { return upper_; }
  const std::vector<double>& points() const noexcept { return points_; }
  /// F at points()[i].
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }

 private:
  std::vector<double> points_;
  std::vector<double> cumulative_;
  double mass_minus_inf_ = 0.0;
  double upper_ = 0.0;
};

/// inf{eps > 0 : F1(x - eps) - eps <= F2(x) <= F1(x + eps) + eps for all x},
/// by bisection on eps with both inequalities checked exactly at every
/// breakpoint of the two step functions.
double levy_distance(const StepCdf& f1, const StepCdf& f2, double tolerance = 1e-13);

}  // namespace xmodel
