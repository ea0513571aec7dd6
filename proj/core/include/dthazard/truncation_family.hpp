#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dthazard/rng.hpp"
#include "dthazard/sample.hpp"

namespace dthazard {

using Params = std::vector<double>;

// Univariate law of the left truncation time U*.
//   Uniform(a, b)  parameters (a, b), optionally fixed
//   Beta(p, q)     on (0, 1)
//   BetaOne(p)     Beta(p, 1), L(u) = u^p on [0, 1]
class ParametricFamily {
 public:
  enum class Kind { kUniform, kBeta, kBetaOne };

  static ParametricFamily uniform();
  static ParametricFamily uniform_fixed(double a, double b);
  static ParametricFamily beta();
  static ParametricFamily beta_one();
  // "beta", "beta1", "uniform"
  static ParametricFamily from_name(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;
  std::vector<std::string> parameter_names() const;
  std::size_t num_params() const { return kind_ == Kind::kBetaOne ? 1 : 2; }
  std::size_t num_free() const { return fixed_ ? 0 : num_params(); }
  bool fixed() const { return fixed_; }
  const Params& fixed_params() const { return fixed_params_; }
  // Beta families are defined on [0, 1] only.
  bool unit_support() const { return kind_ != Kind::kUniform; }

  bool in_bounds(const Params& theta) const;
  double pdf(const Params& theta, double u) const;
  double cdf(const Params& theta, double u) const;
  // log pdf; -inf outside the support.
  double log_pdf(const Params& theta, double u) const;
  // cdf(hi) - cdf(lo), computed without cancellation for the Beta(p, 1) family.
  double cdf_difference(const Params& theta, double hi, double lo) const;
  double quantile(const Params& theta, double prob) const;

  // Unconstrained coordinates used by the optimizer (log p, log q; a, log(b-a)).
  std::vector<double> to_free(const Params& theta) const;
  Params from_free(std::span<const double> z) const;

  // Method-of-moments starting point from the observed left truncation times.
  Params moment_init(std::span<const double> u) const;

 private:
  ParametricFamily(Kind kind, bool fixed, Params fixed_params)
      : kind_(kind), fixed_(fixed), fixed_params_(std::move(fixed_params)) {}

  Kind kind_;
  bool fixed_;
  Params fixed_params_;
};

// Law of the truncation pair (U*, V*) with parameters theta. Supplies the
// likelihood contribution g_theta(u, v), the biasing function G_theta and a
// sampler for the smoothed bootstrap.
class TruncationLaw {
 public:
  virtual ~TruncationLaw() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual std::size_t num_free() const = 0;
  virtual bool in_bounds(const Params& theta) const = 0;
  virtual std::vector<double> to_free(const Params& theta) const = 0;
  virtual Params from_free(std::span<const double> z) const = 0;
  virtual Params initial_params(const Sample& sample) const = 0;

  // log g_theta(u, v); -inf where the density vanishes.
  virtual double log_density(const Params& theta, double u, double v) const = 0;
  // G_theta(t) = P(U* <= t <= V*).
  virtual double biasing(const Params& theta, double t) const = 0;
  virtual std::pair<double, double> draw(const Params& theta, RandomStream& rng) const = 0;
  // Rejects data the law cannot describe (e.g. u outside (0,1) for beta laws).
  virtual void check_sample(const Sample& sample) const = 0;
  // Interval width when V* = U* + tau.
  virtual std::optional<double> tau() const { return std::nullopt; }
};

// Interval sampling: V* = U* + tau, U* ~ family. G(t) = L(t) - L(t - tau).
class IntervalSamplingLaw final : public TruncationLaw {
 public:
  IntervalSamplingLaw(ParametricFamily family, double tau);

  const ParametricFamily& family() const { return family_; }
  std::optional<double> tau() const override { return tau_; }

  std::string name() const override;
  std::vector<std::string> parameter_names() const override { return family_.parameter_names(); }
  std::size_t num_free() const override { return family_.num_free(); }
  bool in_bounds(const Params& theta) const override { return family_.in_bounds(theta); }
  std::vector<double> to_free(const Params& theta) const override { return family_.to_free(theta); }
  Params from_free(std::span<const double> z) const override { return family_.from_free(z); }
  Params initial_params(const Sample& sample) const override;
  double log_density(const Params& theta, double u, double v) const override;
  double biasing(const Params& theta, double t) const override;
  std::pair<double, double> draw(const Params& theta, RandomStream& rng) const override;
  void check_sample(const Sample& sample) const override;

 private:
  ParametricFamily family_;
  double tau_;
};

// General (non-interval) truncation: U* ~ Beta(p, q) on (0, 1) and an
// independent window width W = V* - U* ~ Exponential(rate). Parameters
// (p, q, rate). G_theta is obtained by numeric double integration of the
// joint density over {u <= t <= v}.
class BetaExponentialWidthLaw final : public TruncationLaw {
 public:
  std::string name() const override { return "beta-expwidth"; }
  std::vector<std::string> parameter_names() const override { return {"p", "q", "rate"}; }
  std::size_t num_free() const override { return 3; }
  bool in_bounds(const Params& theta) const override;
  std::vector<double> to_free(const Params& theta) const override;
  Params from_free(std::span<const double> z) const override;
  Params initial_params(const Sample& sample) const override;
  double log_density(const Params& theta, double u, double v) const override;
  double biasing(const Params& theta, double t) const override;
  std::pair<double, double> draw(const Params& theta, RandomStream& rng) const override;
  void check_sample(const Sample& sample) const override;
};

}  // namespace dthazard
