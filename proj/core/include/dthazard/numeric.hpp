#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dthazard {

// Adaptive integral of f over [a, b], split at the given breakpoints (kinks or
// endpoint singularities). Pieces use double-exponential quadrature, which
// tolerates integrable endpoint singularities.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints = {}, double tol = 1e-10);

// Central second difference with step chosen relative to |x|.
double second_derivative(const std::function<double(double)>& f, double x,
                         double rel_step = 1e-4);

// Linear-interpolation quantile (type 7) of an unsorted sample.
double empirical_quantile(std::vector<double> values, double prob);

// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace dthazard
