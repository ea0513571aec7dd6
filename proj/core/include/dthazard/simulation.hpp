#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dthazard/hazard.hpp"
#include "dthazard/kernel.hpp"
#include "dthazard/npmle.hpp"
#include "dthazard/rng.hpp"
#include "dthazard/sample.hpp"
#include "dthazard/spmle.hpp"

namespace dthazard {

// Simulation scenario: lifetime law for X*, left truncation law for U*, and
// interval width tau (V* = U* + tau), with analytic truth.
//   M1   X* ~ 0.75 Beta(3/4, 1) + 0.25,      U* ~ U(0, 1),    tau = 0.25
//   M2   X* ~ 0.75 N(0.5, 0.15) + 0.25,      U* ~ U(0, 1),    tau = 0.25
//   M31  X* as M1,                           U* ~ U(0.25, 1), tau = 0.25
//   M32  as M31 with tau = 0.15;  M33 as M31 with tau = 0.10
//   misspec(a)  as M1 with U* ~ Beta(1, a)
// The 0.15 in M2 is a standard deviation.
class ModelSpec {
 public:
  enum class Id { kM1, kM2, kM31, kM32, kM33, kMisspec };

  static ModelSpec m1();
  static ModelSpec m2();
  static ModelSpec m31();
  static ModelSpec m32();
  static ModelSpec m33();
  static ModelSpec misspec(double a);
  // "m1", "m2", "m31", "m32", "m33", "misspec" (the latter needs a).
  static ModelSpec from_name(const std::string& name, std::optional<double> a = {});

  Id id() const { return id_; }
  std::string name() const;
  double tau() const { return tau_; }
  double misspec_a() const { return a_; }

  double lifetime_pdf(double x) const;
  double lifetime_cdf(double x) const;
  double lifetime_quantile(double p) const;
  double hazard(double x) const;
  double hazard_second_derivative(double x) const;
  // CDF of U*.
  double truncation_cdf(double u) const;
  double G(double t) const;
  double alpha() const { return alpha_; }
  // Lifetime support (the normal law is cut at +-12 sd for integration).
  std::pair<double, double> lifetime_support() const;

  double draw_lifetime(RandomStream& rng) const;
  double draw_left(RandomStream& rng) const;

  // Truncation family that contains the true U* law when possible:
  // free Uniform(a, b) for M31-M33, Beta(p, 1) otherwise.
  ParametricFamily default_sp_family() const;

  // Points where G or f have kinks or singularities.
  std::vector<double> breakpoints() const;

 private:
  ModelSpec(Id id, double tau, double a);
  bool normal_lifetime() const { return id_ == Id::kM2; }
  bool shifted_uniform() const { return id_ == Id::kM31 || id_ == Id::kM32 || id_ == Id::kM33; }

  Id id_;
  double tau_;
  double a_;
  double alpha_ = 0.0;
};

struct GeneratedSample {
  Sample sample;
  std::uint64_t proposals = 0;
};

// Rejection sampling of (X*, U*) until n observable triplets are collected.
GeneratedSample generate_sample_counted(const ModelSpec& model, std::size_t n,
                                        RandomStream& rng);
Sample generate_sample(const ModelSpec& model, std::size_t n, RandomStream& rng);

std::vector<double> true_G_curve(const ModelSpec& model, std::span<const double> grid);
// Empirical coverage (1/N) sum I(U_j <= t <= V_j) from N untruncated pairs.
std::vector<double> true_G_mc(const ModelSpec& model, std::size_t draws,
                              std::span<const double> grid, RandomStream& rng);

// Trapezoid integral of (curve - truth)^2 over [range.first, range.second],
// interpolating the curve linearly at the range ends.
double ise(const HazardCurve& curve, const RealFunction& true_lambda,
           std::pair<double, double> range);

// Default integration range [F^-1(0.05), F^-1(0.90)] of the true lifetime law.
std::pair<double, double> default_ise_range(const ModelSpec& model);

struct StudyOptions {
  std::vector<EstimatorKind> kinds{EstimatorKind::kNp, EstimatorKind::kSp};
  std::vector<double> h_grid;
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  KernelSpec kernel = KernelSpec::epanechnikov();
  std::size_t ise_points = 201;
  std::optional<std::pair<double, double>> ise_range;
  std::size_t threads = 1;
  NpmleOptions npmle{1e-9, 100000, std::nullopt, true, true, false};
  SpmleOptions spmle;
  // Unset: the model's default_sp_family().
  std::optional<ParametricFamily> sp_family;
  std::vector<double> quartile_probs{0.25, 0.5, 0.75};
};

struct KindSummary {
  EstimatorKind kind = EstimatorKind::kNp;
  std::vector<double> mise;      // per h
  std::vector<double> mise_se;   // Monte Carlo standard error per h
  std::size_t used = 0;
  std::size_t dropped = 0;
  double h_opt = 0.0;
  double min_mise = 0.0;
  std::vector<double> mean_curve;  // average estimate at h_opt on the ISE grid
};

struct QuartileCell {
  EstimatorKind kind = EstimatorKind::kNp;
  double prob = 0.0;
  double x = 0.0;
  double truth = 0.0;
  double h = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  std::size_t used = 0;
};

struct StudyResult {
  std::string model;
  double misspec_a = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<double> h_grid;
  std::pair<double, double> ise_range{0.0, 0.0};
  std::vector<double> ise_grid;
  std::vector<double> true_curve;
  std::vector<KindSummary> kinds;
  std::vector<double> ratio_sp_np;  // MISE_sp(h) / MISE_np(h) when both kinds ran
  std::vector<QuartileCell> quartiles;

  const KindSummary* find(EstimatorKind kind) const;
};

// Mean ISE over reps for each (kind, h); argmin per kind; sp/np ratio trace.
// Quartile bias/variance is reported at each kind's h_opt.
StudyResult run_mise_study(const ModelSpec& model, std::size_t n, const StudyOptions& options);

// Empirical bias and variance (denominator M - 1) at the quartiles of F, at a
// single bandwidth.
StudyResult bias_variance_at_quartiles(const ModelSpec& model, std::size_t n, double h,
                                       StudyOptions options);

// Model 1 with U* ~ Beta(1, a) for each a, fitted with the Beta(p, 1) family.
std::vector<StudyResult> misspecification_study(std::span<const double> a_values, std::size_t n,
                                                const StudyOptions& options);

}  // namespace dthazard
