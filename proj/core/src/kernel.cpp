#include "dthazard/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dthazard/errors.hpp"

namespace dthazard {

KernelSpec KernelSpec::from_name(const std::string& name) {
  if (name == "epanechnikov" || name == "epa") return epanechnikov();
  if (name == "gaussian" || name == "normal") return gaussian();
  throw Error(ErrorKind::kUsage, "unknown kernel '" + name + "' (expected epanechnikov|gaussian)");
}

std::string KernelSpec::name() const {
  return kind_ == Kind::kEpanechnikov ? "epanechnikov" : "gaussian";
}

double KernelSpec::operator()(double t) const {
  if (kind_ == Kind::kEpanechnikov) return std::abs(t) <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0;
  return std::exp(-0.5 * t * t) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double KernelSpec::support_radius() const {
  return kind_ == Kind::kEpanechnikov ? 1.0 : std::numeric_limits<double>::infinity();
}

double KernelSpec::roughness() const {
  return kind_ == Kind::kEpanechnikov ? 0.6 : 0.5 * std::numbers::inv_sqrtpi;
}

double KernelSpec::second_moment() const { return kind_ == Kind::kEpanechnikov ? 0.2 : 1.0; }

double KernelSpec::normal_reference_constant() const {
  const double mu2 = second_moment();
  return std::pow(8.0 * std::sqrt(std::numbers::pi) * roughness() / (3.0 * mu2 * mu2), 0.2);
}

double KernelSpec::sample(RandomStream& rng) const {
  if (kind_ == Kind::kGaussian) return rng.normal();
  // Devroye's construction: of three U(-1,1) draws, return the second when the
  // third has the largest magnitude, otherwise the third.
  const double a = rng.uniform(-1.0, 1.0);
  const double b = rng.uniform(-1.0, 1.0);
  const double c = rng.uniform(-1.0, 1.0);
  if (std::abs(c) >= std::abs(b) && std::abs(c) >= std::abs(a)) return b;
  return c;
}

}  // namespace dthazard
