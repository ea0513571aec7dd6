#include "dthazard/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dthazard/errors.hpp"
#include "dthazard/weighted_df.hpp"

namespace dthazard {

namespace {

void require_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::kUsage, "bandwidth must be positive");
}

HazardCurve make_curve(std::span<const double> grid, std::vector<double> values, double h,
                       EstimatorKind kind) {
  HazardCurve c;
  c.grid.assign(grid.begin(), grid.end());
  c.values = std::move(values);
  c.bandwidth = h;
  c.kind = kind;
  return c;
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kNp: return "np";
    case EstimatorKind::kSp: return "sp";
    case EstimatorKind::kNaive: return "naive";
    case EstimatorKind::kOracle: return "oracle";
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_name(const std::string& name) {
  if (name == "np") return EstimatorKind::kNp;
  if (name == "sp") return EstimatorKind::kSp;
  if (name == "naive") return EstimatorKind::kNaive;
  if (name == "oracle") return EstimatorKind::kOracle;
  throw Error(ErrorKind::kUsage, "unknown estimator kind '" + name + "'");
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) throw Error(ErrorKind::kUsage, "grid needs at least 2 points");
  if (!(lo < hi)) throw Error(ErrorKind::kUsage, "grid needs lo < hi");
  std::vector<double> g(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo + step * static_cast<double>(k);
  g.back() = hi;
  return g;
}

std::vector<double> default_grid(const Sample& sample, std::size_t count) {
  const auto x = sample.lifetimes();
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return linspace(*lo - 0.5, *hi + 0.5, count);
  return linspace(*lo, *hi, count);
}

bool grid_near_boundary(std::span<const double> grid, const Sample& sample, double h,
                        const KernelSpec& kernel) {
  const auto x = sample.lifetimes();
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double reach = std::isfinite(kernel.support_radius()) ? h * kernel.support_radius() : h;
  return grid.front() < *lo + reach || grid.back() > *hi - reach;
}

std::vector<double> kernel_weighted_sum(std::span<const double> points,
                                        std::span<const double> weights, double h,
                                        const KernelSpec& kernel, std::span<const double> grid) {
  require_bandwidth(h);
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<double> xs(points.size()), ws(points.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    xs[k] = points[order[k]];
    ws[k] = weights[order[k]];
  }
  const double radius = kernel.support_radius() * h;
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    std::size_t first = 0, last = xs.size();
    if (std::isfinite(radius)) {
      first = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), t - radius) -
                                       xs.begin());
      last = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), t + radius) -
                                      xs.begin());
    }
    double acc = 0.0;
    for (std::size_t k = first; k < last; ++k) acc += ws[k] * kernel.scaled(t - xs[k], h);
    out[g] = acc;
  }
  return out;
}

std::vector<double> hazard_weights(const NpmleFit& fit) {
  std::vector<double> w(fit.phi.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = fit.phi[i] / fit.survival_left[i];
  return w;
}

std::vector<double> hazard_weights(const SpmleFit& fit) {
  std::vector<double> w(fit.masses.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(fit.g_at_x[i] > 0.0))
      throw Error(ErrorKind::kNumerical, "G_theta vanishes at observed lifetime index " +
                                             std::to_string(i));
    w[i] = fit.masses[i] / fit.survival_left[i];
  }
  return w;
}

std::vector<double> naive_hazard_weights(const Sample& sample) {
  const auto x = sample.lifetimes();
  const std::vector<double> mass(x.size(), 1.0 / static_cast<double>(x.size()));
  const auto surv = survival_left_limits(x, mass);
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = mass[i] / surv[i];
  return w;
}

HazardCurve hazard_np(const NpmleFit& fit, double h, const KernelSpec& kernel,
                      std::span<const double> grid) {
  require_bandwidth(h);
  const auto x = fit.sample.lifetimes();
  return make_curve(grid, kernel_weighted_sum(x, hazard_weights(fit), h, kernel, grid), h,
                    EstimatorKind::kNp);
}

HazardCurve hazard_sp(const SpmleFit& fit, double h, const KernelSpec& kernel,
                      std::span<const double> grid) {
  require_bandwidth(h);
  const auto x = fit.sample.lifetimes();
  return make_curve(grid, kernel_weighted_sum(x, hazard_weights(fit), h, kernel, grid), h,
                    EstimatorKind::kSp);
}

HazardCurve hazard_naive(const Sample& sample, double h, const KernelSpec& kernel,
                         std::span<const double> grid) {
  require_bandwidth(h);
  const auto x = sample.lifetimes();
  return make_curve(grid, kernel_weighted_sum(x, naive_hazard_weights(sample), h, kernel, grid),
                    h, EstimatorKind::kNaive);
}

HazardCurve hazard_oracle(const Sample& sample, const RealFunction& true_G,
                          const RealFunction& true_F, double alpha, double h,
                          const KernelSpec& kernel, std::span<const double> grid) {
  require_bandwidth(h);
  const auto x = sample.lifetimes();
  const double n = static_cast<double>(x.size());
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = true_G(x[i]);
    if (!(g > 0.0))
      throw Error(ErrorKind::kData, "true G vanishes at an observed lifetime (invalid model)");
    const double surv = 1.0 - true_F(x[i]);
    w[i] = surv > 0.0 ? alpha / (n * g * surv) : 0.0;
  }
  return make_curve(grid, kernel_weighted_sum(x, w, h, kernel, grid), h, EstimatorKind::kOracle);
}

std::vector<double> weighted_density(const NpmleFit& fit, double h0, const KernelSpec& kernel,
                                     std::span<const double> grid) {
  require_bandwidth(h0);
  const auto x = fit.sample.lifetimes();
  return kernel_weighted_sum(x, fit.phi, h0, kernel, grid);
}

std::vector<double> weighted_density(const SpmleFit& fit, double h0, const KernelSpec& kernel,
                                     std::span<const double> grid) {
  require_bandwidth(h0);
  const auto x = fit.sample.lifetimes();
  return kernel_weighted_sum(x, fit.masses, h0, kernel, grid);
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  double acc = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    acc += 0.5 * (grid[k] - grid[k - 1]) * (values[k] + values[k - 1]);
  return acc;
}

}  // namespace dthazard
