#include "dthazard/spmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dthazard/errors.hpp"
#include "dthazard/nelder_mead.hpp"
#include "dthazard/rng.hpp"

namespace dthazard {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Distinct windows and lifetimes with multiplicities, so tied data (e.g.
// times recorded in whole months) cost one density evaluation per value.
struct LoglikTerms {
  std::vector<std::pair<double, double>> windows;
  std::vector<double> window_count;
  std::vector<double> lifetimes;
  std::vector<double> lifetime_count;

  explicit LoglikTerms(const Sample& sample) {
    std::vector<std::pair<double, double>> w;
    std::vector<double> x;
    for (const Observation& o : sample.observations()) {
      w.emplace_back(o.u, o.v);
      x.push_back(o.x);
    }
    std::sort(w.begin(), w.end());
    std::sort(x.begin(), x.end());
    for (const auto& uv : w) {
      if (windows.empty() || windows.back() != uv) {
        windows.push_back(uv);
        window_count.push_back(0.0);
      }
      window_count.back() += 1.0;
    }
    for (double t : x) {
      if (lifetimes.empty() || lifetimes.back() != t) {
        lifetimes.push_back(t);
        lifetime_count.push_back(0.0);
      }
      lifetime_count.back() += 1.0;
    }
  }

  double eval(const TruncationLaw& law, const Params& theta) const {
    if (!law.in_bounds(theta)) return kNegInf;
    double ll = 0.0;
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const double ld = law.log_density(theta, windows[k].first, windows[k].second);
      if (!std::isfinite(ld)) return kNegInf;
      ll += window_count[k] * ld;
    }
    for (std::size_t k = 0; k < lifetimes.size(); ++k) {
      const double g = law.biasing(theta, lifetimes[k]);
      if (!(g > 0.0)) return kNegInf;
      ll -= lifetime_count[k] * std::log(g);
    }
    return ll;
  }
};

}  // namespace

std::shared_ptr<const TruncationLaw> make_interval_law(const ParametricFamily& family,
                                                       const Sample& sample,
                                                       std::optional<double> tau_override) {
  const std::optional<double> tau = tau_override ? tau_override : sample.tau();
  if (!tau)
    throw Error(ErrorKind::kUsage,
                "sample windows do not share a constant width; pass tau explicitly");
  return std::make_shared<IntervalSamplingLaw>(family, *tau);
}

double G_theta(const TruncationLaw& law, const Params& theta, double t) {
  if (!law.in_bounds(theta)) throw Error(ErrorKind::kUsage, "parameters out of bounds");
  return law.biasing(theta, t);
}

double conditional_loglik_sp(const Sample& sample, const TruncationLaw& law,
                             const Params& theta) {
  return LoglikTerms(sample).eval(law, theta);
}

WeightedDF SpmleFit::lifetime_df() const {
  const auto x = sample.lifetimes();
  return WeightedDF(x, masses);
}

SpmleFit spmle_at(const Sample& sample, std::shared_ptr<const TruncationLaw> law, Params theta) {
  SpmleFit fit;
  fit.sample = sample;
  fit.law = std::move(law);
  fit.theta_hat = std::move(theta);
  const std::size_t n = sample.size();
  fit.g_at_x.resize(n);
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.g_at_x[i] = fit.law->biasing(fit.theta_hat, sample[i].x);
    if (!(fit.g_at_x[i] > 0.0))
      throw Error(ErrorKind::kNumerical, "G_theta vanishes at observed lifetime index " +
                                             std::to_string(i));
    inv_sum += 1.0 / fit.g_at_x[i];
  }
  fit.alpha_sp = static_cast<double>(n) / inv_sum;
  const auto low = std::min_element(fit.g_at_x.begin(), fit.g_at_x.end());
  if (low != fit.g_at_x.end() && *low < 1e-12)
    fit.warning = "G_theta below 1e-12 at observed lifetime index " +
                  std::to_string(low - fit.g_at_x.begin()) +
                  "; the fitted truncation law sits at a parameter boundary";
  fit.masses.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    fit.masses[i] = fit.alpha_sp / (static_cast<double>(n) * fit.g_at_x[i]);
  fit.survival_left = survival_left_limits(sample.lifetimes(), fit.masses);
  fit.cond_loglik = conditional_loglik_sp(sample, *fit.law, fit.theta_hat);
  return fit;
}

SpmleFit fit_spmle(const Sample& sample, std::shared_ptr<const TruncationLaw> law,
                   const SpmleOptions& options) {
  law->check_sample(sample);
  const auto [xmin, xmax] = std::minmax_element(
      sample.observations().begin(), sample.observations().end(),
      [](const Observation& a, const Observation& b) { return a.x < b.x; });
  if (sample.size() > 1 && xmin->x == xmax->x)
    throw Error(ErrorKind::kData, "all lifetimes are equal; the SPMLE is degenerate");

  const Params start = options.init ? *options.init : law->initial_params(sample);
  if (!law->in_bounds(start)) throw Error(ErrorKind::kUsage, "initial parameters out of bounds");
  const std::vector<double> z0 = law->to_free(start);

  const LoglikTerms terms(sample);
  auto objective = [&](const std::vector<double>& z) {
    const double ll = terms.eval(*law, law->from_free(z));
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };

  NelderMeadOptions nm;
  nm.diameter_tol = options.diameter_tol;
  nm.max_steps = options.max_steps;

  SpmleTrace trace;
  std::vector<double> best_z;
  double best_value = std::numeric_limits<double>::infinity();
  const std::size_t starts = std::max<std::size_t>(1, options.restarts);
  const std::size_t runs = law->num_free() == 0 ? 1 : starts;
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<double> z = z0;
    if (r > 0) {
      RandomStream rng(options.seed, r);
      for (double& c : z) c += options.jitter_sigma * rng.normal();
    }
    const double start_value = objective(z);
    const NelderMeadResult res = nelder_mead(objective, z, nm);
    trace.start_logliks.push_back(-start_value);
    trace.end_logliks.push_back(-res.value);
    trace.total_steps += res.steps;
    // Strict comparison keeps the lowest restart index on ties.
    if (res.value < best_value) {
      best_value = res.value;
      best_z = res.x;
      trace.best_restart = r;
    }
  }
  trace.restarts = runs;
  if (!std::isfinite(best_value))
    throw OptimizerFailure("every SPMLE restart ended at an infeasible point");

  Params theta = law->from_free(best_z);
  SpmleFit fit = spmle_at(sample, std::move(law), std::move(theta));
  fit.trace = std::move(trace);
  return fit;
}

SpmleFit fit_spmle(const Sample& sample, const ParametricFamily& family,
                   std::optional<double> tau, const SpmleOptions& options) {
  return fit_spmle(sample, make_interval_law(family, sample, tau), options);
}

double spmle_cdf(const SpmleFit& fit, double x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < fit.g_at_x.size(); ++i)
    if (fit.sample[i].x <= x) acc += 1.0 / fit.g_at_x[i];
  return fit.alpha_sp * acc / static_cast<double>(fit.g_at_x.size());
}

}  // namespace dthazard
