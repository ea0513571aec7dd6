#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dthazard/sample.hpp"
#include "dthazard/weighted_df.hpp"

namespace dthazard {

struct NpmleOptions {
  double tol = 1e-9;           // sup-norm change in phi between sweeps
  std::size_t max_iter = 10000;
  // Warm start; renormalized. Must have one entry per observation.
  std::optional<std::vector<double>> initial_phi;
  bool check_existence = true;
  // When false, hitting max_iter returns a fit flagged converged=false
  // instead of throwing NonConvergence.
  bool throw_on_nonconvergence = true;
  bool record_trace = false;
};

// Efron-Petrosian NPMLE of the lifetime law (phi on x_i) and of the joint
// truncation law (psi on (u_i, v_i)), with the biasing function at the data
// and the no-truncation probability.
struct NpmleFit {
  Sample sample;
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> g_at_x;          // G_n(x_i)
  std::vector<double> survival_left;   // 1 - F_n(x_i-)
  double alpha_n = 1.0;
  double loglik = 0.0;                 // sum_j log(phi_j / Phi_j)
  std::size_t iterations = 0;
  bool converged = false;
  bool existence_checked = false;
  bool exists_unique = true;
  std::vector<double> loglik_trace;    // filled when record_trace is set
  std::string warning;

  WeightedDF lifetime_df() const;
};

// Alternating self-consistency iteration. Throws NonConvergence when
// max_iter is reached (unless disabled). A failed existence condition is
// reported through exists_unique/warning and does not throw.
NpmleFit fit_npmle(const Sample& sample, const NpmleOptions& options = {});

// Conditional log-likelihood sum_j log(phi_j / Phi_j) for arbitrary weights.
double npmle_conditional_loglik(const Sample& sample, std::span<const double> phi);

// G_n(t) = sum_j psi_j I(u_j <= t <= v_j). Zero outside every window.
double biasing_G_np(const NpmleFit& fit, double t);
std::vector<double> biasing_G_np(const NpmleFit& fit, std::span<const double> grid);

// Inverse-probability-weighted form alpha_n n^-1 sum I(x_i <= x) / G_n(x_i).
double ipwe_cdf(const NpmleFit& fit, double x);

// T_n(u, v) = sum_i psi_i I(u_i <= u, v_i <= v).
double npmle_truncation_cdf(const NpmleFit& fit, double u, double v);

}  // namespace dthazard
