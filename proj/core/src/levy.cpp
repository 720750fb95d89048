#include "xmodel/levy.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "xmodel/error.hpp"

namespace xmodel {

StepCdf::StepCdf(std::vector<double> points, std::vector<double> masses, double mass_minus_inf)
    : mass_minus_inf_(mass_minus_inf) {
  if (points.size() != masses.size()) {
    throw Error(ErrorCode::kInvalidParams, "StepCdf needs one mass per point");
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  double running = mass_minus_inf;
  for (const auto i : order) {
    if (masses[i] < 0.0) throw Error(ErrorCode::kInvalidParams, "negative mass in StepCdf");
    running += masses[i];
    if (!points_.empty() && points_.back() == points[i]) {
      cumulative_.back() = running;
    } else {
      points_.push_back(points[i]);
      cumulative_.push_back(running);
    }
  }
  upper_ = running;
}

StepCdf StepCdf::from_samples(const std::vector<double>& samples) {
  const double w = samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size());
  return StepCdf(samples, std::vector<double>(samples.size(), w));
}

StepCdf StepCdf::from_lattice_samples(const std::vector<std::int64_t>& values, std::int64_t den) {
  std::vector<double> x;
  x.reserve(values.size());
  for (const auto v : values) x.push_back(static_cast<double>(v) / static_cast<double>(den));
  return from_samples(x);
}

StepCdf StepCdf::from_distribution(const FtspDistribution& dist) {
  std::vector<double> x;
  x.reserve(dist.values.size());
  for (const auto v : dist.values) x.push_back(static_cast<double>(v) / static_cast<double>(dist.den));
  return StepCdf(std::move(x), dist.mass);
}

double StepCdf::operator()(double x) const {
  const auto it = std::upper_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) return mass_minus_inf_;
  return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

namespace {

bool holds(const StepCdf& f1, const StepCdf& f2, double eps) {
  constexpr double kSlack = 1e-15;
  // Limits at -inf and +inf.
  if (f1.lower_limit() - eps > f2.lower_limit() + kSlack) return false;
  if (f2.lower_limit() > f1.lower_limit() + eps + kSlack) return false;
  if (f1.upper_limit() - eps > f2.upper_limit() + kSlack) return false;
  if (f2.upper_limit() > f1.upper_limit() + eps + kSlack) return false;
  // Lower inequality F1(x - eps) - eps <= F2(x): worst at jumps of F2 and at
  // x = y + eps for jumps y of F1.
  for (std::size_t k = 0; k < f2.points().size(); ++k) {
    const double x = f2.points()[k];
    if (f1(x - eps) - eps > f2.cumulative()[k] + kSlack) return false;
    if (f2.cumulative()[k] > f1(x + eps) + eps + kSlack) return false;
  }
  for (std::size_t i = 0; i < f1.points().size(); ++i) {
    const double y = f1.points()[i];
    // F1 at its own jump is read off directly rather than re-evaluated at
    // (y + eps) - eps, which may round below y.
    const double f1y = f1.cumulative()[i];
    if (f1y - eps > f2(y + eps) + kSlack) return false;
    // Upper inequality F2(x) <= F1(x + eps) + eps at x = y - eps, where
    // F1(x + eps) = F1(y).
    if (f2(y - eps) > f1y + eps + kSlack) return false;
  }
  return true;
}

}  // namespace

double levy_distance(const StepCdf& f1, const StepCdf& f2, double tolerance) {
  if (holds(f1, f2, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (!holds(f1, f2, hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (holds(f1, f2, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace xmodel
