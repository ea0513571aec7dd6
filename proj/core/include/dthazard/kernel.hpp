#pragma once

#include <string>

#include "dthazard/rng.hpp"

namespace dthazard {

// Second-order symmetric kernel with its roughness R(K) = int K^2 and second
// moment mu2(K) = int t^2 K.
class KernelSpec {
 public:
  enum class Kind { kEpanechnikov, kGaussian };

  static KernelSpec epanechnikov() { return KernelSpec(Kind::kEpanechnikov); }
  static KernelSpec gaussian() { return KernelSpec(Kind::kGaussian); }
  static KernelSpec from_name(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;

  double operator()(double t) const;
  // K_h(t) = K(t / h) / h
  double scaled(double t, double h) const { return (*this)(t / h) / h; }
  // Half-width of the support; infinite for the Gaussian.
  double support_radius() const;
  double roughness() const;
  double second_moment() const;
  // Normal-reference constant c in h = c * sigma * n^(-1/5) for density estimation.
  double normal_reference_constant() const;

  // Draw from K.
  double sample(RandomStream& rng) const;

 private:
  explicit KernelSpec(Kind kind) : kind_(kind) {}
  Kind kind_;
};

}  // namespace dthazard
