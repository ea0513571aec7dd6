#include <cmath>
#include <numeric>

#include "doctest.h"
#include "dthazard/errors.hpp"
#include "dthazard/simulation.hpp"
#include "dthazard/spmle.hpp"

using namespace dthazard;

TEST_SUITE("spmle") {

TEST_CASE("beta(p, 1) closed forms") {
  const auto f = ParametricFamily::beta_one();
  const auto g = ParametricFamily::beta();
  for (double p : {0.05, 0.75, 1.0, 3.0})
    for (double u : {0.01, 0.3, 0.9}) {
      CHECK(f.cdf({p}, u) == doctest::Approx(std::pow(u, p)).epsilon(1e-12));
      CHECK(f.pdf({p}, u) == doctest::Approx(p * std::pow(u, p - 1)).epsilon(1e-12));
      CHECK(f.log_pdf({p}, u) == doctest::Approx(std::log(f.pdf({p}, u))).epsilon(1e-12));
      CHECK(g.cdf({p, 1.0}, u) == doctest::Approx(f.cdf({p}, u)).epsilon(1e-10));
      CHECK(g.log_pdf({p, 2.0}, u) == doctest::Approx(std::log(g.pdf({p, 2.0}, u))).epsilon(1e-10));
    }
  CHECK(f.cdf({0.5}, -0.1) == 0.0);
  CHECK(f.cdf({0.5}, 1.5) == 1.0);
  CHECK(std::isinf(f.log_pdf({0.5}, 1.5)));
}

TEST_CASE("cdf difference keeps precision near p = 0") {
  const auto f = ParametricFamily::beta_one();
  const double p = 1e-9;
  const double d = f.cdf_difference({p}, 0.5, 0.25);
  CHECK(d == doctest::Approx(p * std::log(2.0)).epsilon(1e-6));
  CHECK(f.cdf_difference({2.0}, 0.5, 0.25) == doctest::Approx(0.25 - 0.0625));
}

TEST_CASE("free coordinates round trip") {
  for (const auto& [fam, theta] :
       {std::pair{ParametricFamily::beta(), Params{0.7, 2.5}},
        std::pair{ParametricFamily::beta_one(), Params{1.3}},
        std::pair{ParametricFamily::uniform(), Params{0.25, 1.0}}}) {
    const auto back = fam.from_free(fam.to_free(theta));
    REQUIRE(back.size() == theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k)
      CHECK(back[k] == doctest::Approx(theta[k]).epsilon(1e-12));
  }
}

TEST_CASE("interval law biasing matches model truth") {
  const ModelSpec m = ModelSpec::m1();
  const IntervalSamplingLaw law(ParametricFamily::uniform(), 0.25);
  for (double t : {0.1, 0.25, 0.5, 0.99, 1.1})
    CHECK(law.biasing({0.0, 1.0}, t) == doctest::Approx(m.G(t)).epsilon(1e-12));
  const ModelSpec m31 = ModelSpec::m31();
  for (double t : {0.3, 0.45, 0.6, 1.2})
    CHECK(law.biasing({0.25, 1.0}, t) == doctest::Approx(m31.G(t)).epsilon(1e-12));
}

TEST_CASE("recovers the truncation law") {
  RandomStream rng(31, 0);
  const Sample s31 = generate_sample(ModelSpec::m31(), 2000, rng);
  const SpmleFit u = fit_spmle(s31, ParametricFamily::uniform());
  CHECK(u.theta_hat[0] == doctest::Approx(0.25).epsilon(0.2));
  CHECK(u.theta_hat[1] == doctest::Approx(1.0).epsilon(0.1));

  const Sample s1 = generate_sample(ModelSpec::m1(), 2000, rng);
  const SpmleFit b = fit_spmle(s1, ParametricFamily::beta_one());
  CHECK(b.theta_hat[0] == doctest::Approx(1.0).epsilon(0.15));
  CHECK(b.alpha_sp == doctest::Approx(ModelSpec::m1().alpha()).epsilon(0.1));
}

TEST_CASE("estimate is a local maximum of the conditional likelihood") {
  RandomStream rng(32, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 300, rng);
  const SpmleFit fit = fit_spmle(s, ParametricFamily::beta());
  CHECK(fit.cond_loglik == doctest::Approx(conditional_loglik_sp(s, *fit.law, fit.theta_hat)));
  for (double dp : {-0.02, 0.02})
    for (double dq : {-0.02, 0.02}) {
      const Params t{fit.theta_hat[0] * (1 + dp), fit.theta_hat[1] * (1 + dq)};
      CHECK(conditional_loglik_sp(s, *fit.law, t) <= fit.cond_loglik + 1e-9);
    }
}

TEST_CASE("masses, cdf and determinism") {
  RandomStream rng(33, 0);
  const Sample s = generate_sample(ModelSpec::m2(), 250, rng);
  const SpmleFit a = fit_spmle(s, ParametricFamily::beta_one());
  const SpmleFit b = fit_spmle(s, ParametricFamily::beta_one());
  CHECK(a.theta_hat == b.theta_hat);
  CHECK(std::accumulate(a.masses.begin(), a.masses.end(), 0.0) == doctest::Approx(1.0));
  const WeightedDF df = a.lifetime_df();
  for (std::size_t i = 0; i < s.size(); i += 17)
    CHECK(spmle_cdf(a, s[i].x) == doctest::Approx(df.cdf(s[i].x)).epsilon(1e-9));
  CHECK(a.trace.restarts == 5);
}

TEST_CASE("beta laws reject data outside the unit interval") {
  const std::vector<Observation> raw{{-0.1, 0.1, 0.15}, {0.2, 0.3, 0.45}};
  CHECK_THROWS_AS(fit_spmle(validate_sample(raw), ParametricFamily::beta(), 0.25), Error);
}

TEST_CASE("interval law needs a width") {
  const std::vector<Observation> raw{{0.0, 0.1, 0.15}, {0.2, 0.3, 0.6}};
  CHECK_THROWS_AS(fit_spmle(validate_sample(raw), ParametricFamily::beta()), Error);
}

}
