#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dthazard/hazard.hpp"
#include "dthazard/kernel.hpp"
#include "dthazard/npmle.hpp"
#include "dthazard/rng.hpp"
#include "dthazard/sample.hpp"
#include "dthazard/spmle.hpp"

namespace dthazard {

struct BootstrapConfig {
  std::size_t B = 500;
  double level = 0.95;
  double pilot_h0 = 0.0;  // must be set (> 0)
  std::uint64_t seed = 1;
  std::uint64_t max_rejections_per_draw = 1'000'000;
  std::size_t threads = 1;
  // SPMLE refits start at the full-data theta with this many restarts.
  std::size_t sp_restarts = 1;
};

void validate_bootstrap_config(const BootstrapConfig& config);

// Smoothed resampling law: X = x_i + h0 * eps with i drawn with probability
// mass_i (proportional to 1 / G(x_i)) and eps ~ K; (U, V) from the fitted
// truncation law. A triplet is kept only when U <= X <= V.
class Resampler {
 public:
  // sp: (U, V) from T_theta.
  Resampler(const SpmleFit& fit, double pilot_h0, const KernelSpec& kernel);
  // np: (U, V) drawn among the observed windows with probabilities psi.
  Resampler(const NpmleFit& fit, double pilot_h0, const KernelSpec& kernel);

  double draw_lifetime(RandomStream& rng) const;
  std::pair<double, double> draw_window(RandomStream& rng) const;

 private:
  std::vector<double> points_;
  std::vector<double> point_cdf_;
  double h0_;
  KernelSpec kernel_;
  std::shared_ptr<const TruncationLaw> law_;
  Params theta_;
  std::vector<std::pair<double, double>> windows_;
  std::vector<double> window_cdf_;
};

// One accepted triplet; throws RejectionBudgetExceeded after max_rejections
// consecutive rejections. `proposals` (optional) accumulates the draw count.
Observation resample_one(const Resampler& law, RandomStream& rng, std::uint64_t max_rejections,
                         std::uint64_t* proposals = nullptr);
Sample resample(const Resampler& law, std::size_t n, RandomStream& rng,
                std::uint64_t max_rejections);

// Pointwise percentile bands from bootstrap replicates.
struct BandResult {
  std::vector<double> grid;
  std::vector<double> estimate;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t requested = 0;
  std::size_t used = 0;
  std::size_t dropped = 0;
};

// Evaluates a curve on a bootstrap sample; nullopt drops the replicate.
using CurveEvaluator = std::function<std::optional<std::vector<double>>(const Sample&)>;

// Replicate b draws n triplets from stream (seed, b) and applies evaluate.
// Throws when fewer than min(B, max(20, ceil(B/2))) replicates are usable.
BandResult bootstrap_bands(const Resampler& law, std::size_t n, std::span<const double> grid,
                           std::vector<double> estimate, const CurveEvaluator& evaluate,
                           const BootstrapConfig& config);

// Hazard bands around the full-data estimate at bandwidth h.
HazardCurve confidence_bands(const NpmleFit& fit, double h, const KernelSpec& kernel,
                             std::span<const double> grid, const BootstrapConfig& config,
                             BandResult* detail = nullptr);
HazardCurve confidence_bands(const SpmleFit& fit, double h, const KernelSpec& kernel,
                             std::span<const double> grid, const BootstrapConfig& config,
                             BandResult* detail = nullptr);

// Bands for the biasing function G_n or G_theta.
BandResult biasing_bands(const NpmleFit& fit, const KernelSpec& kernel,
                         std::span<const double> grid, const BootstrapConfig& config);
BandResult biasing_bands(const SpmleFit& fit, const KernelSpec& kernel,
                         std::span<const double> grid, const BootstrapConfig& config);

}  // namespace dthazard
