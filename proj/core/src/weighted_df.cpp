#include "dthazard/weighted_df.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dthazard/errors.hpp"

namespace dthazard {

WeightedDF::WeightedDF(std::span<const double> points, std::span<const double> masses) {
  if (points.size() != masses.size() || points.empty())
    throw Error(ErrorKind::kUsage, "WeightedDF needs matching non-empty points and masses");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  double total = 0.0;
  for (std::size_t k : order) {
    const double m = masses[k];
    if (!(m >= 0.0) || !std::isfinite(points[k]))
      throw Error(ErrorKind::kUsage, "WeightedDF masses must be non-negative and points finite");
    if (!points_.empty() && points_.back() == points[k]) {
      masses_.back() += m;
    } else {
      points_.push_back(points[k]);
      masses_.push_back(m);
    }
    total += m;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kUsage, "WeightedDF total mass is zero");
  for (double& m : masses_) m /= total;
  cumulative_.resize(masses_.size());
  std::partial_sum(masses_.begin(), masses_.end(), cumulative_.begin());
  // Pin the last cumulative value so F(max point) is exactly one.
  cumulative_.back() = 1.0;
}

double WeightedDF::cdf(double t) const {
  const auto it = std::upper_bound(points_.begin(), points_.end(), t);
  if (it == points_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double WeightedDF::cdf_left(double t) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), t);
  if (it == points_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double WeightedDF::quantile(double prob) const {
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), prob);
  if (it == cumulative_.end()) return points_.back();
  return points_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<double> survival_left_limits(std::span<const double> lifetimes,
                                         std::span<const double> masses) {
  const std::size_t n = lifetimes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lifetimes[a] < lifetimes[b]; });
  // Tail sums from the right so the largest atom keeps full relative precision.
  std::vector<double> out(n);
  double tail = 0.0;
  std::size_t k = n;
  while (k > 0) {
    std::size_t start = k - 1;
    while (start > 0 && lifetimes[order[start - 1]] == lifetimes[order[k - 1]]) --start;
    for (std::size_t r = start; r < k; ++r) tail += masses[order[r]];
    for (std::size_t r = start; r < k; ++r) out[order[r]] = tail;
    k = start;
  }
  return out;
}

}  // namespace dthazard
