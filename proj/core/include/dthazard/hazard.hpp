#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dthazard/kernel.hpp"
#include "dthazard/npmle.hpp"
#include "dthazard/sample.hpp"
#include "dthazard/spmle.hpp"

namespace dthazard {

enum class EstimatorKind { kNp, kSp, kNaive, kOracle };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_name(const std::string& name);

struct HazardCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  EstimatorKind kind = EstimatorKind::kNp;
  std::optional<std::vector<double>> lower;
  std::optional<std::vector<double>> upper;
};

using RealFunction = std::function<double(double)>;

std::vector<double> linspace(double lo, double hi, std::size_t count);
// `count` equispaced points over [min x, max x].
std::vector<double> default_grid(const Sample& sample, std::size_t count = 256);
// True when the grid comes within h of either end of the lifetime range,
// where the estimators carry uncorrected boundary bias.
bool grid_near_boundary(std::span<const double> grid, const Sample& sample, double h,
                        const KernelSpec& kernel);

// sum_i weights_i K_h(t - points_i) at every grid point t.
std::vector<double> kernel_weighted_sum(std::span<const double> points,
                                        std::span<const double> weights, double h,
                                        const KernelSpec& kernel, std::span<const double> grid);

// Per-observation hazard weights: mass_i / (1 - F(x_i-)).
std::vector<double> hazard_weights(const NpmleFit& fit);
std::vector<double> hazard_weights(const SpmleFit& fit);
std::vector<double> naive_hazard_weights(const Sample& sample);

HazardCurve hazard_np(const NpmleFit& fit, double h, const KernelSpec& kernel,
                      std::span<const double> grid);
HazardCurve hazard_sp(const SpmleFit& fit, double h, const KernelSpec& kernel,
                      std::span<const double> grid);
HazardCurve hazard_naive(const Sample& sample, double h, const KernelSpec& kernel,
                         std::span<const double> grid);
// Artificial estimator built from the true G, F and alpha.
HazardCurve hazard_oracle(const Sample& sample, const RealFunction& true_G,
                          const RealFunction& true_F, double alpha, double h,
                          const KernelSpec& kernel, std::span<const double> grid);

// Smoothed weighted density alpha n^-1 sum K_h0(x - x_i) / G(x_i).
std::vector<double> weighted_density(const NpmleFit& fit, double h0, const KernelSpec& kernel,
                                     std::span<const double> grid);
std::vector<double> weighted_density(const SpmleFit& fit, double h0, const KernelSpec& kernel,
                                     std::span<const double> grid);

// Composite trapezoid rule over (grid, values).
double trapezoid(std::span<const double> grid, std::span<const double> values);

}  // namespace dthazard
