#include "dthazard/truncation_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "dthazard/errors.hpp"

namespace dthazard {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double beta_pdf(double p, double q, double u) {
  if (u < 0.0 || u > 1.0) return 0.0;
  if (u == 0.0) return p < 1.0 ? std::numeric_limits<double>::infinity() : (p == 1.0 ? q : 0.0);
  if (u == 1.0) return q < 1.0 ? std::numeric_limits<double>::infinity() : (q == 1.0 ? p : 0.0);
  return boost::math::ibeta_derivative(p, q, u);
}

double beta_cdf(double p, double q, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return boost::math::ibeta(p, q, u);
}

std::pair<double, double> mean_var(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, v.size() > 1 ? ss / (n - 1.0) : 0.0};
}

std::vector<double> left_times(const Sample& sample) {
  std::vector<double> u(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) u[i] = sample[i].u;
  return u;
}

void require_unit_u(const Sample& sample, const std::string& law) {
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double u = sample[i].u;
    if (u < 0.0 || u > 1.0)
      throw Error(ErrorKind::kData,
                  "left truncation time at index " + std::to_string(i) +
                      " lies outside [0, 1]; the " + law +
                      " law needs data rescaled to the unit interval first (affine transform)");
  }
}

}  // namespace

ParametricFamily ParametricFamily::uniform() { return {Kind::kUniform, false, {}}; }

ParametricFamily ParametricFamily::uniform_fixed(double a, double b) {
  if (!(a < b)) throw Error(ErrorKind::kUsage, "uniform family needs a < b");
  return {Kind::kUniform, true, {a, b}};
}

ParametricFamily ParametricFamily::beta() { return {Kind::kBeta, false, {}}; }
ParametricFamily ParametricFamily::beta_one() { return {Kind::kBetaOne, false, {}}; }

ParametricFamily ParametricFamily::from_name(const std::string& name) {
  if (name == "beta") return beta();
  if (name == "beta1") return beta_one();
  if (name == "uniform") return uniform();
  throw Error(ErrorKind::kUsage, "unknown family '" + name + "' (expected beta|beta1|uniform)");
}

std::string ParametricFamily::name() const {
  switch (kind_) {
    case Kind::kUniform: return fixed_ ? "uniform-fixed" : "uniform";
    case Kind::kBeta: return "beta";
    case Kind::kBetaOne: return "beta1";
  }
  return "unknown";
}

std::vector<std::string> ParametricFamily::parameter_names() const {
  switch (kind_) {
    case Kind::kUniform: return {"a", "b"};
    case Kind::kBeta: return {"p", "q"};
    case Kind::kBetaOne: return {"p"};
  }
  return {};
}

bool ParametricFamily::in_bounds(const Params& theta) const {
  if (theta.size() != num_params()) return false;
  for (double t : theta)
    if (!std::isfinite(t)) return false;
  switch (kind_) {
    case Kind::kUniform: return theta[0] < theta[1];
    case Kind::kBeta: return theta[0] > 0.0 && theta[1] > 0.0;
    case Kind::kBetaOne: return theta[0] > 0.0;
  }
  return false;
}

double ParametricFamily::pdf(const Params& theta, double u) const {
  switch (kind_) {
    case Kind::kUniform:
      return (u < theta[0] || u > theta[1]) ? 0.0 : 1.0 / (theta[1] - theta[0]);
    case Kind::kBeta: return beta_pdf(theta[0], theta[1], u);
    case Kind::kBetaOne:
      if (u < 0.0 || u > 1.0) return 0.0;
      return theta[0] * std::pow(u, theta[0] - 1.0);
  }
  return 0.0;
}

double ParametricFamily::cdf(const Params& theta, double u) const {
  switch (kind_) {
    case Kind::kUniform:
      if (u <= theta[0]) return 0.0;
      if (u >= theta[1]) return 1.0;
      return (u - theta[0]) / (theta[1] - theta[0]);
    case Kind::kBeta: return beta_cdf(theta[0], theta[1], u);
    case Kind::kBetaOne:
      if (u <= 0.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return std::pow(u, theta[0]);
  }
  return 0.0;
}

double ParametricFamily::log_pdf(const Params& theta, double u) const {
  if (kind_ == Kind::kBeta && u > 0.0 && u < 1.0) {
    const double p = theta[0], q = theta[1];
    const double lbeta = std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
    return (p - 1.0) * std::log(u) + (q - 1.0) * std::log1p(-u) - lbeta;
  }
  const double d = pdf(theta, u);
  return d > 0.0 ? std::log(d) : kNegInf;
}

double ParametricFamily::cdf_difference(const Params& theta, double hi, double lo) const {
  if (kind_ != Kind::kBetaOne || lo <= 0.0 || hi <= lo) return cdf(theta, hi) - cdf(theta, lo);
  const double p = theta[0];
  // hi^p - lo^p = hi^p (1 - (lo/hi)^p); small p would cancel otherwise.
  if (hi >= 1.0) return lo >= 1.0 ? 0.0 : -std::expm1(p * std::log(lo));
  return std::pow(hi, p) * -std::expm1(p * std::log(lo / hi));
}

double ParametricFamily::quantile(const Params& theta, double prob) const {
  switch (kind_) {
    case Kind::kUniform: return theta[0] + (theta[1] - theta[0]) * prob;
    case Kind::kBeta: return boost::math::ibeta_inv(theta[0], theta[1], prob);
    case Kind::kBetaOne: return std::pow(prob, 1.0 / theta[0]);
  }
  return 0.0;
}

std::vector<double> ParametricFamily::to_free(const Params& theta) const {
  if (fixed_) return {};
  switch (kind_) {
    case Kind::kUniform: return {theta[0], std::log(theta[1] - theta[0])};
    case Kind::kBeta: return {std::log(theta[0]), std::log(theta[1])};
    case Kind::kBetaOne: return {std::log(theta[0])};
  }
  return {};
}

Params ParametricFamily::from_free(std::span<const double> z) const {
  if (fixed_) return fixed_params_;
  switch (kind_) {
    case Kind::kUniform: return {z[0], z[0] + std::exp(z[1])};
    case Kind::kBeta: return {std::exp(z[0]), std::exp(z[1])};
    case Kind::kBetaOne: return {std::exp(z[0])};
  }
  return {};
}

Params ParametricFamily::moment_init(std::span<const double> u) const {
  if (fixed_) return fixed_params_;
  const auto [m, var] = mean_var(u);
  switch (kind_) {
    case Kind::kUniform: {
      const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
      const double pad = std::max(1e-6, 1e-6 * (*hi - *lo));
      return {*lo - pad, *hi + pad};
    }
    case Kind::kBeta: {
      if (m > 0.0 && m < 1.0 && var > 0.0 && var < m * (1.0 - m)) {
        const double common = m * (1.0 - m) / var - 1.0;
        return {m * common, (1.0 - m) * common};
      }
      return {1.0, 1.0};
    }
    case Kind::kBetaOne:
      if (m > 0.0 && m < 1.0) return {m / (1.0 - m)};
      return {1.0};
  }
  return {};
}

IntervalSamplingLaw::IntervalSamplingLaw(ParametricFamily family, double tau)
    : family_(std::move(family)), tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(ErrorKind::kUsage, "interval width tau must be positive");
}

std::string IntervalSamplingLaw::name() const {
  std::ostringstream os;
  os.precision(17);
  os << family_.name() << "(tau=" << tau_ << ")";
  return os.str();
}

Params IntervalSamplingLaw::initial_params(const Sample& sample) const {
  return family_.moment_init(left_times(sample));
}

double IntervalSamplingLaw::log_density(const Params& theta, double u, double /*v*/) const {
  return family_.log_pdf(theta, u);
}

double IntervalSamplingLaw::biasing(const Params& theta, double t) const {
  return family_.cdf_difference(theta, t, t - tau_);
}

std::pair<double, double> IntervalSamplingLaw::draw(const Params& theta, RandomStream& rng) const {
  const double u = family_.quantile(theta, rng.uniform());
  return {u, u + tau_};
}

void IntervalSamplingLaw::check_sample(const Sample& sample) const {
  if (family_.unit_support()) require_unit_u(sample, family_.name());
}

bool BetaExponentialWidthLaw::in_bounds(const Params& theta) const {
  return theta.size() == 3 && theta[0] > 0.0 && theta[1] > 0.0 && theta[2] > 0.0 &&
         std::isfinite(theta[0]) && std::isfinite(theta[1]) && std::isfinite(theta[2]);
}

std::vector<double> BetaExponentialWidthLaw::to_free(const Params& theta) const {
  return {std::log(theta[0]), std::log(theta[1]), std::log(theta[2])};
}

Params BetaExponentialWidthLaw::from_free(std::span<const double> z) const {
  return {std::exp(z[0]), std::exp(z[1]), std::exp(z[2])};
}

Params BetaExponentialWidthLaw::initial_params(const Sample& sample) const {
  Params theta = ParametricFamily::beta().moment_init(left_times(sample));
  std::vector<double> widths(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) widths[i] = sample[i].v - sample[i].u;
  const double mean_width = mean_var(widths).first;
  theta.push_back(mean_width > 0.0 ? 1.0 / mean_width : 1.0);
  return theta;
}

double BetaExponentialWidthLaw::log_density(const Params& theta, double u, double v) const {
  if (v < u) return kNegInf;
  const double d = beta_pdf(theta[0], theta[1], u);
  if (!(d > 0.0)) return kNegInf;
  return std::log(d) + std::log(theta[2]) - theta[2] * (v - u);
}

double BetaExponentialWidthLaw::biasing(const Params& theta, double t) const {
  if (t <= 0.0) return 0.0;
  const double p = theta[0], q = theta[1], rate = theta[2];
  const double upper_u = std::min(t, 1.0);
  boost::math::quadrature::exp_sinh<double> inner_rule;
  boost::math::quadrature::tanh_sinh<double> outer_rule;
  // Inner integral over v in [t, inf) of the joint density; outer over u in [0, min(t, 1)].
  auto inner = [&](double u) {
    const double lu = beta_pdf(p, q, u);
    if (!(lu > 0.0) || !std::isfinite(lu)) return 0.0;
    auto integrand = [&](double s) { return lu * rate * std::exp(-rate * (t + s - u)); };
    return inner_rule.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-8);
  };
  return outer_rule.integrate(inner, 0.0, upper_u, 1e-8);
}

std::pair<double, double> BetaExponentialWidthLaw::draw(const Params& theta,
                                                        RandomStream& rng) const {
  const double u = boost::math::ibeta_inv(theta[0], theta[1], rng.uniform());
  return {u, u + rng.exponential(theta[2])};
}

void BetaExponentialWidthLaw::check_sample(const Sample& sample) const {
  require_unit_u(sample, name());
}

}  // namespace dthazard
