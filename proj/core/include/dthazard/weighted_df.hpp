#pragma once

#include <span>
#include <vector>

namespace dthazard {

// Discrete distribution on finitely many support points. Tied points are
// merged into a single atom; masses are renormalized to sum to one.
class WeightedDF {
 public:
  WeightedDF() = default;
  // points and masses are parallel arrays; points need not be sorted.
  WeightedDF(std::span<const double> points, std::span<const double> masses);

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& masses() const { return masses_; }

  // F(t) = sum of masses at points <= t.
  double cdf(double t) const;
  // F(t-) = sum of masses at points < t.
  double cdf_left(double t) const;
  double eval(double t, bool left_limit) const { return left_limit ? cdf_left(t) : cdf(t); }

  // Smallest support point p with F(p) >= prob.
  double quantile(double prob) const;

 private:
  std::vector<double> points_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;  // cumulative_[k] = F(points_[k])
};

// Left limits 1 - F(x_i-) for each x_i under the distribution putting mass
// masses[i] on lifetimes[i]. Tied lifetimes share the same value.
std::vector<double> survival_left_limits(std::span<const double> lifetimes,
                                         std::span<const double> masses);

}  // namespace dthazard
