#include "dthazard/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dthazard/errors.hpp"
#include "dthazard/numeric.hpp"
#include "dthazard/parallel.hpp"

namespace dthazard {

namespace {

std::vector<double> cumulative(std::span<const double> w) {
  std::vector<double> c(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0)) throw Error(ErrorKind::kNumerical, "negative resampling weight");
    acc += w[i];
    c[i] = acc;
  }
  if (!(acc > 0.0)) throw Error(ErrorKind::kNumerical, "resampling weights sum to zero");
  for (double& v : c) v /= acc;
  c.back() = 1.0;
  return c;
}

std::size_t pick(const std::vector<double>& cdf, double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

void validate_bootstrap_config(const BootstrapConfig& c) {
  if (c.B < 1) throw Error(ErrorKind::kUsage, "bootstrap needs B >= 1");
  if (!(c.level > 0.0 && c.level < 1.0))
    throw Error(ErrorKind::kUsage, "band level must lie in (0, 1)");
  if (!(c.pilot_h0 > 0.0) || !std::isfinite(c.pilot_h0))
    throw Error(ErrorKind::kUsage, "pilot bandwidth h0 must be positive");
  if (c.max_rejections_per_draw < 1)
    throw Error(ErrorKind::kUsage, "rejection budget must be >= 1");
}

Resampler::Resampler(const SpmleFit& fit, double pilot_h0, const KernelSpec& kernel)
    : points_(fit.sample.lifetimes()),
      point_cdf_(cumulative(fit.masses)),
      h0_(pilot_h0),
      kernel_(kernel),
      law_(fit.law),
      theta_(fit.theta_hat) {}

Resampler::Resampler(const NpmleFit& fit, double pilot_h0, const KernelSpec& kernel)
    : points_(fit.sample.lifetimes()),
      point_cdf_(cumulative(fit.phi)),
      h0_(pilot_h0),
      kernel_(kernel),
      window_cdf_(cumulative(fit.psi)) {
  for (const Observation& o : fit.sample.observations()) windows_.emplace_back(o.u, o.v);
}

double Resampler::draw_lifetime(RandomStream& rng) const {
  const std::size_t i = pick(point_cdf_, rng.uniform());
  return points_[i] + h0_ * kernel_.sample(rng);
}

std::pair<double, double> Resampler::draw_window(RandomStream& rng) const {
  if (law_) return law_->draw(theta_, rng);
  return windows_[pick(window_cdf_, rng.uniform())];
}

Observation resample_one(const Resampler& law, RandomStream& rng, std::uint64_t max_rejections,
                         std::uint64_t* proposals) {
  for (std::uint64_t k = 0; k < max_rejections; ++k) {
    const double x = law.draw_lifetime(rng);
    const auto [u, v] = law.draw_window(rng);
    if (proposals) ++*proposals;
    if (u <= x && x <= v) return {u, x, v};
  }
  throw RejectionBudgetExceeded("no observable triplet after " + std::to_string(max_rejections) +
                                " consecutive proposals; the smoothed lifetime law and the "
                                "fitted windows barely overlap");
}

Sample resample(const Resampler& law, std::size_t n, RandomStream& rng,
                std::uint64_t max_rejections) {
  std::vector<Observation> obs(n);
  for (auto& o : obs) o = resample_one(law, rng, max_rejections);
  return validate_sample(obs);
}

BandResult bootstrap_bands(const Resampler& law, std::size_t n, std::span<const double> grid,
                           std::vector<double> estimate, const CurveEvaluator& evaluate,
                           const BootstrapConfig& config) {
  validate_bootstrap_config(config);
  std::vector<std::optional<std::vector<double>>> curves(config.B);
  parallel_for(config.B, std::max<std::size_t>(1, config.threads), [&](std::size_t b) {
    RandomStream rng(config.seed, b);
    const Sample boot = resample(law, n, rng, config.max_rejections_per_draw);
    curves[b] = evaluate(boot);
  });

  BandResult out;
  out.grid.assign(grid.begin(), grid.end());
  out.estimate = std::move(estimate);
  out.requested = config.B;
  std::vector<const std::vector<double>*> usable;
  for (const auto& c : curves)
    if (c) usable.push_back(&*c);
  out.used = usable.size();
  out.dropped = config.B - out.used;
  const std::size_t half = (config.B + 1) / 2;
  const std::size_t needed = std::min(config.B, std::max<std::size_t>(20, half));
  if (out.used < needed)
    throw Error(ErrorKind::kNumerical,
                "only " + std::to_string(out.used) + " of " + std::to_string(config.B) +
                    " bootstrap replicates were usable (need " + std::to_string(needed) +
                    "); refits failed on the others");

  const double lo_p = 0.5 * (1.0 - config.level), hi_p = 0.5 * (1.0 + config.level);
  out.lower.resize(grid.size());
  out.upper.resize(grid.size());
  std::vector<double> column(usable.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t b = 0; b < usable.size(); ++b) column[b] = (*usable[b])[g];
    out.lower[g] = empirical_quantile(column, lo_p);
    out.upper[g] = empirical_quantile(column, hi_p);
  }
  return out;
}

namespace {

HazardCurve attach(HazardCurve curve, const BandResult& bands, BandResult* detail) {
  curve.lower = bands.lower;
  curve.upper = bands.upper;
  if (detail) *detail = bands;
  return curve;
}

NpmleOptions bootstrap_npmle_options() {
  NpmleOptions o;
  o.throw_on_nonconvergence = false;
  return o;
}

SpmleOptions bootstrap_spmle_options(const SpmleFit& fit, const BootstrapConfig& config) {
  SpmleOptions o;
  o.init = fit.theta_hat;
  o.restarts = std::max<std::size_t>(1, config.sp_restarts);
  return o;
}

}  // namespace

HazardCurve confidence_bands(const NpmleFit& fit, double h, const KernelSpec& kernel,
                             std::span<const double> grid, const BootstrapConfig& config,
                             BandResult* detail) {
  validate_bootstrap_config(config);
  HazardCurve est = hazard_np(fit, h, kernel, grid);
  const Resampler law(fit, config.pilot_h0, kernel);
  auto eval = [&](const Sample& s) -> std::optional<std::vector<double>> {
    const NpmleFit b = fit_npmle(s, bootstrap_npmle_options());
    if (!b.exists_unique || !b.converged) return std::nullopt;
    return hazard_np(b, h, kernel, grid).values;
  };
  const BandResult bands = bootstrap_bands(law, fit.sample.size(), grid, est.values, eval, config);
  return attach(std::move(est), bands, detail);
}

HazardCurve confidence_bands(const SpmleFit& fit, double h, const KernelSpec& kernel,
                             std::span<const double> grid, const BootstrapConfig& config,
                             BandResult* detail) {
  validate_bootstrap_config(config);
  HazardCurve est = hazard_sp(fit, h, kernel, grid);
  const Resampler law(fit, config.pilot_h0, kernel);
  const SpmleOptions opts = bootstrap_spmle_options(fit, config);
  auto eval = [&](const Sample& s) -> std::optional<std::vector<double>> {
    try {
      return hazard_sp(fit_spmle(s, fit.law, opts), h, kernel, grid).values;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  const BandResult bands = bootstrap_bands(law, fit.sample.size(), grid, est.values, eval, config);
  return attach(std::move(est), bands, detail);
}

BandResult biasing_bands(const NpmleFit& fit, const KernelSpec& kernel,
                         std::span<const double> grid, const BootstrapConfig& config) {
  validate_bootstrap_config(config);
  const Resampler law(fit, config.pilot_h0, kernel);
  auto eval = [&](const Sample& s) -> std::optional<std::vector<double>> {
    const NpmleFit b = fit_npmle(s, bootstrap_npmle_options());
    if (!b.exists_unique || !b.converged) return std::nullopt;
    return biasing_G_np(b, grid);
  };
  return bootstrap_bands(law, fit.sample.size(), grid, biasing_G_np(fit, grid), eval, config);
}

BandResult biasing_bands(const SpmleFit& fit, const KernelSpec& kernel,
                         std::span<const double> grid, const BootstrapConfig& config) {
  validate_bootstrap_config(config);
  const Resampler law(fit, config.pilot_h0, kernel);
  const SpmleOptions opts = bootstrap_spmle_options(fit, config);
  auto curve = [&](const SpmleFit& f) {
    std::vector<double> g(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) g[k] = f.biasing(grid[k]);
    return g;
  };
  auto eval = [&](const Sample& s) -> std::optional<std::vector<double>> {
    try {
      return curve(fit_spmle(s, fit.law, opts));
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  return bootstrap_bands(law, fit.sample.size(), grid, curve(fit), eval, config);
}

}  // namespace dthazard
