#include "dthazard/npmle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "dthazard/errors.hpp"
#include "dthazard/existence.hpp"
#include "dthazard/window_index.hpp"

namespace dthazard {

namespace {

// Phi_j = sum of phi over lifetimes inside window j.
void window_masses(const WindowIndex& idx, std::span<const double> phi,
                   std::vector<double>& prefix, std::vector<double>& out) {
  const std::size_t n = idx.size();
  prefix[0] = 0.0;
  for (std::size_t r = 0; r < n; ++r) prefix[r + 1] = prefix[r] + phi[idx.order[r]];
  for (std::size_t j = 0; j < n; ++j) out[j] = prefix[idx.hi[j]] - prefix[idx.lo[j]];
}

// G_i = sum of psi over windows containing x_i.
void coverage(const WindowIndex& idx, std::span<const double> psi, std::vector<double>& diff,
              std::vector<double>& out) {
  const std::size_t n = idx.size();
  std::fill(diff.begin(), diff.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    diff[idx.lo[j]] += psi[j];
    diff[idx.hi[j]] -= psi[j];
  }
  double running = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    running += diff[r];
    out[idx.order[r]] = running;
  }
}

// out_i = (1 / in_i) / sum_k (1 / in_k).
void normalized_reciprocal(std::span<const double> in, std::vector<double>& out) {
  double total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = 1.0 / in[i];
    total += out[i];
  }
  for (double& o : out) o /= total;
}

double loglik_from(std::span<const double> phi, std::span<const double> window_mass) {
  double ll = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) ll += std::log(phi[j] / window_mass[j]);
  return ll;
}

}  // namespace

WeightedDF NpmleFit::lifetime_df() const {
  const auto x = sample.lifetimes();
  return WeightedDF(x, phi);
}

double npmle_conditional_loglik(const Sample& sample, std::span<const double> phi) {
  const WindowIndex idx(sample);
  std::vector<double> prefix(sample.size() + 1), mass(sample.size());
  window_masses(idx, phi, prefix, mass);
  return loglik_from(phi, mass);
}

NpmleFit fit_npmle(const Sample& sample, const NpmleOptions& options) {
  const std::size_t n = sample.size();
  NpmleFit fit;
  fit.sample = sample;

  if (options.check_existence) {
    const ExistenceReport report = check_existence(sample);
    fit.existence_checked = true;
    fit.exists_unique = report.exists_unique;
    if (!report.exists_unique)
      fit.warning = "NPMLE existence/uniqueness condition fails (" +
                    std::to_string(report.scc_count) + " strongly connected components, " +
                    std::to_string(report.necessary_violations.size()) +
                    " necessary-condition violations)";
  }

  const WindowIndex idx(sample);
  std::vector<double> phi(n, 1.0 / static_cast<double>(n));
  if (options.initial_phi) {
    if (options.initial_phi->size() != n)
      throw Error(ErrorKind::kUsage, "initial_phi has wrong length");
    const double total =
        std::accumulate(options.initial_phi->begin(), options.initial_phi->end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) phi[i] = (*options.initial_phi)[i] / total;
  }

  std::vector<double> prefix(n + 1), window_mass(n), psi(n), diff(n + 1), g(n), next(n);
  [[maybe_unused]] double prev_ll = -std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  bool converged = false;
  while (iter < options.max_iter) {
    ++iter;
    window_masses(idx, phi, prefix, window_mass);
    const double ll = loglik_from(phi, window_mass);
    if (options.record_trace) fit.loglik_trace.push_back(ll);
    assert(!(ll < prev_ll - 1e-9 * (1.0 + std::abs(prev_ll))) && "likelihood decreased");
    prev_ll = ll;

    normalized_reciprocal(window_mass, psi);
    coverage(idx, psi, diff, g);
    normalized_reciprocal(g, next);

    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - phi[i]));
    phi.swap(next);
    if (change < options.tol) {
      converged = true;
      break;
    }
  }

  // Without existence the iteration drifts toward the boundary; that case is
  // reported through exists_unique instead of an exception.
  if (!converged && options.throw_on_nonconvergence && fit.exists_unique)
    throw NonConvergence("NPMLE did not converge within " + std::to_string(options.max_iter) +
                         " iterations");

  window_masses(idx, phi, prefix, window_mass);
  fit.loglik = loglik_from(phi, window_mass);
  fit.phi = std::move(phi);
  fit.psi = std::move(psi);
  fit.g_at_x = std::move(g);
  double inv_sum = 0.0;
  for (double gi : fit.g_at_x) inv_sum += 1.0 / gi;
  fit.alpha_n = static_cast<double>(n) / inv_sum;
  fit.iterations = iter;
  fit.converged = converged;
  fit.survival_left = survival_left_limits(sample.lifetimes(), fit.phi);
  return fit;
}

double biasing_G_np(const NpmleFit& fit, double t) {
  double g = 0.0;
  for (std::size_t j = 0; j < fit.psi.size(); ++j) {
    const Observation& o = fit.sample[j];
    if (o.u <= t && t <= o.v) g += fit.psi[j];
  }
  return g;
}

std::vector<double> biasing_G_np(const NpmleFit& fit, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  std::transform(grid.begin(), grid.end(), out.begin(),
                 [&](double t) { return biasing_G_np(fit, t); });
  return out;
}

double ipwe_cdf(const NpmleFit& fit, double x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < fit.g_at_x.size(); ++i) {
    if (fit.sample[i].x > x) continue;
    if (!(fit.g_at_x[i] > 0.0))
      throw Error(ErrorKind::kExistence, "G_n vanishes at an observed lifetime");
    acc += 1.0 / fit.g_at_x[i];
  }
  return fit.alpha_n * acc / static_cast<double>(fit.g_at_x.size());
}

double npmle_truncation_cdf(const NpmleFit& fit, double u, double v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < fit.psi.size(); ++i)
    if (fit.sample[i].u <= u && fit.sample[i].v <= v) acc += fit.psi[i];
  return acc;
}

}  // namespace dthazard
