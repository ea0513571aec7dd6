#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "dthazard/sample.hpp"
#include "dthazard/truncation_family.hpp"
#include "dthazard/weighted_df.hpp"

namespace dthazard {

struct SpmleOptions {
  std::optional<Params> init;    // overrides the moment-based start
  std::size_t restarts = 5;      // total starts, the first one unjittered
  std::uint64_t seed = 20210901; // jitter stream
  double jitter_sigma = 0.5;     // lognormal jitter on the free coordinates
  std::size_t max_steps = 2000;
  double diameter_tol = 1e-7;
};

struct SpmleTrace {
  std::size_t restarts = 0;
  std::size_t total_steps = 0;
  std::size_t best_restart = 0;
  std::vector<double> start_logliks;
  std::vector<double> end_logliks;
};

// Semiparametric fit: theta maximizing the conditional likelihood of the
// truncation times given the lifetimes, and the inverse-probability-weighted
// lifetime distribution with masses alpha / (n G_theta(x_i)).
struct SpmleFit {
  Sample sample;
  std::shared_ptr<const TruncationLaw> law;
  Params theta_hat;
  std::vector<double> g_at_x;
  std::vector<double> masses;          // per observation
  std::vector<double> survival_left;   // 1 - F(x_i-)
  double alpha_sp = 1.0;
  double cond_loglik = 0.0;
  SpmleTrace trace;
  std::string warning;  // set when some G_theta(x_i) < 1e-12

  std::optional<double> tau() const { return law->tau(); }
  WeightedDF lifetime_df() const;
  double biasing(double t) const { return law->biasing(theta_hat, t); }
};

// Interval-sampling law for `family`, taking tau from the override or from the
// sample's detected constant width.
std::shared_ptr<const TruncationLaw> make_interval_law(const ParametricFamily& family,
                                                       const Sample& sample,
                                                       std::optional<double> tau_override = {});

double G_theta(const TruncationLaw& law, const Params& theta, double t);

// Sum_i [log g_theta(u_i, v_i) - log G_theta(x_i)]; -inf when any term vanishes.
double conditional_loglik_sp(const Sample& sample, const TruncationLaw& law, const Params& theta);

SpmleFit fit_spmle(const Sample& sample, std::shared_ptr<const TruncationLaw> law,
                   const SpmleOptions& options = {});
SpmleFit fit_spmle(const Sample& sample, const ParametricFamily& family,
                   std::optional<double> tau = {}, const SpmleOptions& options = {});

// Fit object at a given theta (no optimization).
SpmleFit spmle_at(const Sample& sample, std::shared_ptr<const TruncationLaw> law, Params theta);

// F_theta(x) = alpha n^-1 sum I(x_i <= x) / G_theta(x_i).
double spmle_cdf(const SpmleFit& fit, double x);

}  // namespace dthazard
