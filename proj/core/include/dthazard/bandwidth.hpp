#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dthazard/hazard.hpp"
#include "dthazard/kernel.hpp"
#include "dthazard/npmle.hpp"
#include "dthazard/sample.hpp"
#include "dthazard/spmle.hpp"

namespace dthazard {

struct LscvOptions {
  KernelSpec kernel = KernelSpec::epanechnikov();
  // Unset: [F^-1(0.05), F^-1(0.90)] of the full-data corrected CDF.
  std::optional<std::pair<double, double>> integration_range;
  std::size_t integration_points = 512;
  std::size_t threads = 1;
  // Leave-one-out refit budgets (warm-started at the full-data fit).
  std::size_t sp_loo_max_steps = 100;
  std::size_t np_loo_max_iter = 200;
};

// LSCV(h) = int lambda_h^2 - (2/n) sum_i c_i lambda_{h,-i}(x_i) over h_grid,
// with c_i = alpha_{-i} / (G_{-i}(x_i) (1 - F_{-i}(x_i-))). The sum runs over
// x_i inside the integration range. Left-out points whose refit fails (NPMLE
// nonexistence, zero G_{-i}(x_i)) and the largest lifetime with a vanishing
// denominator are skipped and counted.
struct BandwidthSearch {
  EstimatorKind kind = EstimatorKind::kNp;
  std::vector<double> h_grid;
  std::vector<double> scores;
  std::vector<double> integral_term;  // int lambda_h^2 per h
  std::vector<double> cross_term;     // (2/n) sum_i c_i lambda_{h,-i}(x_i) per h
  double h_star = 0.0;
  std::pair<double, double> integration_range{0.0, 0.0};
  std::size_t loo_used = 0;
  std::vector<std::size_t> loo_skipped;
  std::string warning;  // argmin at a grid endpoint
};

// 30 geometric points from h_rot / 4 to 4 h_rot, with h_rot the
// normal-reference density bandwidth of the raw lifetimes.
std::vector<double> default_h_grid(const Sample& sample, const KernelSpec& kernel,
                                   std::size_t count = 30);
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

std::pair<double, double> default_integration_range(const WeightedDF& df);

BandwidthSearch select_bandwidth(const NpmleFit& fit, std::span<const double> h_grid,
                                 const LscvOptions& options = {});
BandwidthSearch select_bandwidth(const SpmleFit& fit, std::span<const double> h_grid,
                                 const LscvOptions& options = {});
BandwidthSearch select_bandwidth_naive(const Sample& sample, std::span<const double> h_grid,
                                       const LscvOptions& options = {});

// Single-bandwidth scores; refit the full data with default options.
double lscv_score_sp(const Sample& sample, const ParametricFamily& family,
                     std::optional<double> tau, double h, const KernelSpec& kernel,
                     std::optional<std::pair<double, double>> integration_range = {});
double lscv_score_np(const Sample& sample, double h, const KernelSpec& kernel,
                     std::optional<std::pair<double, double>> integration_range = {});

struct AmiseInputs {
  RealFunction lambda;
  RealFunction lambda_dd;
  RealFunction G;
  RealFunction F;
  double alpha = 1.0;
};

// [alpha R(K) int lambda / (G (1 - F)) / (R(lambda'') mu2^2)]^(1/5) n^(-1/5),
// with both integrals over the range.
double amise_bandwidth(const AmiseInputs& truth, const KernelSpec& kernel, std::size_t n,
                       std::pair<double, double> range);

}  // namespace dthazard
