#include <numeric>

#include "doctest.h"
#include "dthazard/errors.hpp"
#include "dthazard/npmle.hpp"
#include "dthazard/simulation.hpp"
#include "support/oracles.hpp"

using namespace dthazard;

namespace {

Sample connected_sample(std::size_t n, RandomStream& rng) {
  for (;;) {
    Sample s = oracle::random_sample(n, rng, 0.3, 0.9);
    if (oracle::strongly_connected(s)) return s;
  }
}

}  // namespace

TEST_SUITE("npmle") {

TEST_CASE("matches simplex grid search for n = 3") {
  RandomStream rng(21, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Sample s = connected_sample(3, rng);
    const NpmleFit fit = fit_npmle(s);
    const auto brute = oracle::brute_force_npmle(s);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(fit.phi[i] - brute[i]) <= 2e-3);
    CHECK(fit.loglik >= oracle::conditional_loglik(s, brute) - 1e-9);
  }
}

TEST_CASE("no truncation gives the empirical distribution") {
  std::vector<Observation> raw;
  RandomStream rng(22, 0);
  for (int i = 0; i < 40; ++i) raw.push_back({-1.0, rng.uniform(), 2.0});
  const NpmleFit fit = fit_npmle(validate_sample(raw));
  CHECK(fit.alpha_n == doctest::Approx(1.0).epsilon(1e-12));
  for (double p : fit.phi) CHECK(p == doctest::Approx(1.0 / 40).epsilon(1e-12));
  for (double g : fit.g_at_x) CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-likelihood trace is non-decreasing") {
  RandomStream rng(23, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 150, rng);
  NpmleOptions o;
  o.record_trace = true;
  const NpmleFit fit = fit_npmle(s, o);
  REQUIRE(fit.loglik_trace.size() >= 2);
  for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k)
    CHECK(fit.loglik_trace[k] >= fit.loglik_trace[k - 1] - 1e-9);
  CHECK(fit.loglik == doctest::Approx(npmle_conditional_loglik(s, fit.phi)));
  CHECK(fit.loglik == doctest::Approx(oracle::conditional_loglik(s, fit.phi)));
}

TEST_CASE("fitted laws are probability vectors with the IPW identity") {
  RandomStream rng(24, 0);
  const Sample s = generate_sample(ModelSpec::m31(), 200, rng);
  const NpmleFit fit = fit_npmle(s);
  REQUIRE(fit.converged);
  CHECK(std::accumulate(fit.phi.begin(), fit.phi.end(), 0.0) == doctest::Approx(1.0));
  CHECK(std::accumulate(fit.psi.begin(), fit.psi.end(), 0.0) == doctest::Approx(1.0));
  const WeightedDF df = fit.lifetime_df();
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(biasing_G_np(fit, s[i].x) == doctest::Approx(fit.g_at_x[i]).epsilon(1e-12));
    CHECK(std::abs(ipwe_cdf(fit, s[i].x) - df.cdf(s[i].x)) < 1e-6);
  }
  CHECK(biasing_G_np(fit, -5.0) == 0.0);
  CHECK(npmle_truncation_cdf(fit, 10.0, 10.0) == doctest::Approx(1.0));
}

TEST_CASE("nonexistence is reported, not thrown") {
  const std::vector<Observation> raw{{0.0, 0.1, 0.5}, {0.3, 0.4, 0.6}};
  const NpmleFit fit = fit_npmle(validate_sample(raw));
  CHECK(fit.existence_checked);
  CHECK_FALSE(fit.exists_unique);
  CHECK_FALSE(fit.warning.empty());
}

TEST_CASE("iteration budget") {
  RandomStream rng(25, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 100, rng);
  NpmleOptions o;
  o.max_iter = 1;
  CHECK_THROWS_AS(fit_npmle(s, o), NonConvergence);
  o.throw_on_nonconvergence = false;
  CHECK_FALSE(fit_npmle(s, o).converged);
}

TEST_CASE("warm start reaches the same fixed point") {
  RandomStream rng(26, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 120, rng);
  const NpmleFit cold = fit_npmle(s);
  NpmleOptions o;
  o.initial_phi = cold.phi;
  const NpmleFit warm = fit_npmle(s, o);
  CHECK(warm.iterations <= 2);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(warm.phi[i] - cold.phi[i]) < 1e-8);
}

}
