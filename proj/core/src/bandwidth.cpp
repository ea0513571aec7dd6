#include "dthazard/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "dthazard/errors.hpp"
#include "dthazard/numeric.hpp"
#include "dthazard/parallel.hpp"
#include "dthazard/weighted_df.hpp"

namespace dthazard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinDenominator = 1e-10;

// Leave-one-out fit of the sample without observation i: masses on the
// remaining lifetimes (in original order) and alpha_{-i} / G_{-i}(x_i).
struct LooFit {
  std::vector<double> masses;
  double ratio = 0.0;
};
using LooProvider = std::function<std::optional<LooFit>(std::size_t)>;

enum class LooStatus { kUsed, kSkipped, kInfinite };

struct LooContribution {
  LooStatus status = LooStatus::kSkipped;
  std::vector<double> cross;  // coef_i * lambda_{h,-i}(x_i) per h
};

void require_h_grid(std::span<const double> h_grid) {
  if (h_grid.empty()) throw Error(ErrorKind::kUsage, "bandwidth grid must be non-empty");
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    if (!(h_grid[k] > 0.0) || !std::isfinite(h_grid[k]))
      throw Error(ErrorKind::kUsage, "bandwidths must be positive");
    if (k > 0 && !(h_grid[k] > h_grid[k - 1]))
      throw Error(ErrorKind::kUsage, "bandwidth grid must be strictly increasing");
  }
}

std::vector<double> drop_index(std::span<const double> v, std::size_t skip) {
  std::vector<double> out;
  out.reserve(v.size() - 1);
  for (std::size_t j = 0; j < v.size(); ++j)
    if (j != skip) out.push_back(v[j]);
  return out;
}

BandwidthSearch run_lscv(EstimatorKind kind, const Sample& sample,
                         std::span<const double> full_masses, std::span<const double> full_weights,
                         const LooProvider& loo, std::span<const double> h_grid,
                         const LscvOptions& opt) {
  require_h_grid(h_grid);
  const std::size_t n = sample.size();
  if (n < 3) throw Error(ErrorKind::kData, "LSCV needs at least 3 observations");
  const auto x = sample.lifetimes();

  BandwidthSearch out;
  out.kind = kind;
  out.h_grid.assign(h_grid.begin(), h_grid.end());
  out.integration_range =
      opt.integration_range.value_or(default_integration_range(WeightedDF(x, full_masses)));
  const auto [lo, hi] = out.integration_range;
  if (!(lo < hi)) throw Error(ErrorKind::kUsage, "integration range must satisfy lo < hi");

  const std::size_t nh = h_grid.size();
  const auto igrid = linspace(lo, hi, std::max<std::size_t>(512, opt.integration_points));
  out.integral_term.resize(nh);
  for (std::size_t k = 0; k < nh; ++k) {
    auto vals = kernel_weighted_sum(x, full_weights, h_grid[k], opt.kernel, igrid);
    for (double& v : vals) v *= v;
    out.integral_term[k] = trapezoid(igrid, vals);
  }

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] >= lo && x[i] <= hi) candidates.push_back(i);
  const double xmax = *std::max_element(x.begin(), x.end());

  std::vector<LooContribution> parts(candidates.size());
  parallel_for(candidates.size(), std::max<std::size_t>(1, opt.threads), [&](std::size_t c) {
    const std::size_t i = candidates[c];
    LooContribution& part = parts[c];
    const std::optional<LooFit> fit = loo(i);
    if (!fit || !(fit->ratio > 0.0) || !std::isfinite(fit->ratio)) return;
    const auto xo = drop_index(x, i);
    double surv = 0.0;
    for (std::size_t j = 0; j < xo.size(); ++j)
      if (xo[j] >= x[i]) surv += fit->masses[j];
    if (surv < kMinDenominator) {
      part.status = x[i] == xmax ? LooStatus::kSkipped : LooStatus::kInfinite;
      return;
    }
    const double coef = fit->ratio / surv;
    const auto s = survival_left_limits(xo, fit->masses);
    std::vector<double> w(xo.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = fit->masses[j] / s[j];
    const double at[1] = {x[i]};
    part.cross.resize(nh);
    for (std::size_t k = 0; k < nh; ++k)
      part.cross[k] = coef * kernel_weighted_sum(xo, w, h_grid[k], opt.kernel, at)[0];
    part.status = LooStatus::kUsed;
  });

  out.cross_term.assign(nh, 0.0);
  bool infinite = false;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    switch (parts[c].status) {
      case LooStatus::kUsed:
        ++out.loo_used;
        for (std::size_t k = 0; k < nh; ++k) out.cross_term[k] += parts[c].cross[k];
        break;
      case LooStatus::kSkipped: out.loo_skipped.push_back(candidates[c]); break;
      case LooStatus::kInfinite: infinite = true; break;
    }
  }
  out.scores.resize(nh);
  for (std::size_t k = 0; k < nh; ++k) {
    out.cross_term[k] *= 2.0 / static_cast<double>(n);
    out.scores[k] = infinite ? kInf : out.integral_term[k] - out.cross_term[k];
  }

  std::size_t best = nh;
  for (std::size_t k = 0; k < nh; ++k)
    if (std::isfinite(out.scores[k]) && (best == nh || out.scores[k] < out.scores[best])) best = k;
  if (best == nh)
    throw Error(ErrorKind::kNumerical,
                "every LSCV score is infinite (a leave-one-out survival denominator vanished)");
  out.h_star = h_grid[best];
  if (best == 0 || best + 1 == nh)
    out.warning = "LSCV minimum lies at a grid endpoint (h = " + std::to_string(out.h_star) +
                  "); widen the bandwidth grid";
  return out;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::kUsage, "geometric grid needs 0 < lo < hi");
  if (count < 2) throw Error(ErrorKind::kUsage, "grid needs at least 2 points");
  std::vector<double> g(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo * std::exp(step * static_cast<double>(k));
  g.back() = hi;
  return g;
}

std::vector<double> default_h_grid(const Sample& sample, const KernelSpec& kernel,
                                   std::size_t count) {
  const auto x = sample.lifetimes();
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw Error(ErrorKind::kData, "need at least 2 lifetimes for a bandwidth");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorKind::kData, "all lifetimes are equal; no bandwidth scale");
  const double h_rot = kernel.normal_reference_constant() * sd * std::pow(n, -0.2);
  return geometric_grid(0.25 * h_rot, 4.0 * h_rot, count);
}

std::pair<double, double> default_integration_range(const WeightedDF& df) {
  return {df.quantile(0.05), df.quantile(0.90)};
}

BandwidthSearch select_bandwidth(const NpmleFit& fit, std::span<const double> h_grid,
                                 const LscvOptions& options) {
  const Sample& sample = fit.sample;
  auto loo = [&](std::size_t i) -> std::optional<LooFit> {
    NpmleOptions o;
    o.max_iter = options.np_loo_max_iter;
    o.initial_phi = drop_index(fit.phi, i);
    o.check_existence = true;
    o.throw_on_nonconvergence = false;
    const NpmleFit sub = fit_npmle(sample.without(i), o);
    if (!sub.exists_unique) return std::nullopt;
    const double g = biasing_G_np(sub, sample[i].x);
    if (!(g > 0.0)) return std::nullopt;
    return LooFit{sub.phi, sub.alpha_n / g};
  };
  return run_lscv(EstimatorKind::kNp, sample, fit.phi, hazard_weights(fit), loo, h_grid, options);
}

BandwidthSearch select_bandwidth(const SpmleFit& fit, std::span<const double> h_grid,
                                 const LscvOptions& options) {
  const Sample& sample = fit.sample;
  auto loo = [&](std::size_t i) -> std::optional<LooFit> {
    SpmleOptions o;
    o.init = fit.theta_hat;
    o.restarts = 1;
    o.max_steps = options.sp_loo_max_steps;
    try {
      const SpmleFit sub = fit_spmle(sample.without(i), fit.law, o);
      const double g = sub.biasing(sample[i].x);
      if (!(g > 0.0)) return std::nullopt;
      return LooFit{sub.masses, sub.alpha_sp / g};
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  return run_lscv(EstimatorKind::kSp, sample, fit.masses, hazard_weights(fit), loo, h_grid,
                  options);
}

BandwidthSearch select_bandwidth_naive(const Sample& sample, std::span<const double> h_grid,
                                       const LscvOptions& options) {
  const std::size_t n = sample.size();
  const std::vector<double> mass(n, 1.0 / static_cast<double>(n));
  auto loo = [&](std::size_t) -> std::optional<LooFit> {
    return LooFit{std::vector<double>(n - 1, 1.0 / static_cast<double>(n - 1)), 1.0};
  };
  return run_lscv(EstimatorKind::kNaive, sample, mass, naive_hazard_weights(sample), loo, h_grid,
                  options);
}

double lscv_score_sp(const Sample& sample, const ParametricFamily& family,
                     std::optional<double> tau, double h, const KernelSpec& kernel,
                     std::optional<std::pair<double, double>> integration_range) {
  LscvOptions o;
  o.kernel = kernel;
  o.integration_range = integration_range;
  const double grid[1] = {h};
  return select_bandwidth(fit_spmle(sample, family, tau), grid, o).scores[0];
}

double lscv_score_np(const Sample& sample, double h, const KernelSpec& kernel,
                     std::optional<std::pair<double, double>> integration_range) {
  LscvOptions o;
  o.kernel = kernel;
  o.integration_range = integration_range;
  const double grid[1] = {h};
  return select_bandwidth(fit_npmle(sample), grid, o).scores[0];
}

double amise_bandwidth(const AmiseInputs& truth, const KernelSpec& kernel, std::size_t n,
                       std::pair<double, double> range) {
  if (n < 2) throw Error(ErrorKind::kUsage, "AMISE bandwidth needs n >= 2");
  const auto [lo, hi] = range;
  if (!(lo < hi)) throw Error(ErrorKind::kUsage, "integration range must satisfy lo < hi");
  const double variance_integral = integrate(
      [&](double t) { return truth.lambda(t) / (truth.G(t) * (1.0 - truth.F(t))); }, lo, hi);
  const double curvature = integrate(
      [&](double t) {
        const double d = truth.lambda_dd(t);
        return d * d;
      },
      lo, hi);
  if (!(curvature > 0.0))
    throw Error(ErrorKind::kUsage,
                "R(lambda'') vanishes on the range; the AMISE bandwidth is undefined, use LSCV");
  const double mu2 = kernel.second_moment();
  const double num = truth.alpha * kernel.roughness() * variance_integral;
  return std::pow(num / (curvature * mu2 * mu2), 0.2) * std::pow(static_cast<double>(n), -0.2);
}

}  // namespace dthazard
