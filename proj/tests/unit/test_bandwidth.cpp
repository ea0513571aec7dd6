#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dthazard/bandwidth.hpp"
#include "dthazard/errors.hpp"
#include "dthazard/simulation.hpp"

using namespace dthazard;

namespace {

AmiseInputs truth_of(const ModelSpec& m) {
  return {[m](double t) { return m.hazard(t); },
          [m](double t) { return m.hazard_second_derivative(t); },
          [m](double t) { return m.G(t); }, [m](double t) { return m.lifetime_cdf(t); },
          m.alpha()};
}

}  // namespace

TEST_SUITE("bandwidth") {

TEST_CASE("grids") {
  const auto g = geometric_grid(0.01, 1.0, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(0.01));
  CHECK(g[1] == doctest::Approx(0.1));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 3), Error);

  RandomStream rng(51, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 200, rng);
  const auto d = default_h_grid(s, KernelSpec::epanechnikov());
  CHECK(d.size() == 30);
  CHECK(d.back() / d.front() == doctest::Approx(16.0));

  const NpmleFit fit = fit_npmle(s);
  const std::vector<double> bad{0.2, 0.1};
  CHECK_THROWS_AS(select_bandwidth(fit, bad), Error);
  const std::vector<double> neg{-0.1, 0.1};
  CHECK_THROWS_AS(select_bandwidth(fit, neg), Error);
}

TEST_CASE("scores agree with single-bandwidth evaluation") {
  RandomStream rng(52, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 120, rng);
  const auto grid = geometric_grid(0.04, 0.4, 8);
  const BandwidthSearch np = select_bandwidth(fit_npmle(s), grid);
  const auto best = std::min_element(np.scores.begin(), np.scores.end()) - np.scores.begin();
  CHECK(np.h_star == grid[best]);
  for (std::size_t k : {std::size_t{0}, std::size_t{5}})
    CHECK(np.scores[k] ==
          doctest::Approx(lscv_score_np(s, grid[k], KernelSpec::epanechnikov())).epsilon(1e-8));
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(np.scores[k] == doctest::Approx(np.integral_term[k] - np.cross_term[k]));

  const BandwidthSearch sp = select_bandwidth(fit_spmle(s, ParametricFamily::beta_one()), grid);
  CHECK(sp.scores[3] == doctest::Approx(lscv_score_sp(s, ParametricFamily::beta_one(), {},
                                                      grid[3], KernelSpec::epanechnikov()))
                            .epsilon(1e-6));
}

TEST_CASE("criterion is U-shaped on a moderate sample") {
  RandomStream rng(53, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 400, rng);
  const auto grid = geometric_grid(0.01, 0.6, 20);
  const BandwidthSearch np = select_bandwidth(fit_npmle(s), grid);
  CHECK(np.warning.empty());
  CHECK(np.h_star > grid.front());
  CHECK(np.h_star < grid.back());
}

TEST_CASE("without truncation the np and naive criteria coincide") {
  std::vector<Observation> raw;
  RandomStream rng(54, 0);
  for (int i = 0; i < 80; ++i) raw.push_back({-1.0, rng.uniform(), 2.0});
  const Sample s = validate_sample(raw);
  const auto grid = geometric_grid(0.05, 0.5, 6);
  LscvOptions o;
  o.integration_range = std::pair{0.1, 0.8};
  const BandwidthSearch np = select_bandwidth(fit_npmle(s), grid, o);
  const BandwidthSearch nv = select_bandwidth_naive(s, grid, o);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(np.scores[k] == doctest::Approx(nv.scores[k]).epsilon(1e-8));
}

TEST_CASE("permuting the sample leaves scores unchanged") {
  RandomStream rng(55, 0);
  const Sample s = generate_sample(ModelSpec::m31(), 90, rng);
  std::vector<Observation> rev(s.observations().rbegin(), s.observations().rend());
  const Sample r = validate_sample(rev);
  const auto grid = geometric_grid(0.05, 0.3, 4);
  const BandwidthSearch a = select_bandwidth(fit_npmle(s), grid);
  const BandwidthSearch b = select_bandwidth(fit_npmle(r), grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(a.scores[k] == doctest::Approx(b.scores[k]).epsilon(1e-7));
}

TEST_CASE("single-point grid flags the endpoint") {
  RandomStream rng(56, 0);
  const Sample s = generate_sample(ModelSpec::m1(), 60, rng);
  const std::vector<double> one{0.1};
  const BandwidthSearch nv = select_bandwidth_naive(s, one);
  CHECK(nv.h_star == 0.1);
  CHECK_FALSE(nv.warning.empty());
}

TEST_CASE("amise bandwidth against independent quadrature") {
  const ModelSpec m = ModelSpec::m31();
  const auto range = default_ise_range(m);
  const KernelSpec k = KernelSpec::epanechnikov();
  const int steps = 200000;
  const double dx = (range.second - range.first) / steps;
  double var = 0, rough = 0;
  for (int i = 0; i <= steps; ++i) {
    const double t = range.first + i * dx;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    var += w * m.hazard(t) / (m.G(t) * (1 - m.lifetime_cdf(t)));
    const double d2 = m.hazard_second_derivative(t);
    rough += w * d2 * d2;
  }
  var *= dx;
  rough *= dx;
  const std::size_t n = 1000;
  const double want = std::pow(m.alpha() * k.roughness() * var /
                                   (rough * k.second_moment() * k.second_moment() * n),
                               0.2);
  const double got = amise_bandwidth(truth_of(m), k, n, range);
  CHECK(got == doctest::Approx(want).epsilon(1e-4));
  CHECK(got / amise_bandwidth(truth_of(m), k, 32 * n, range) == doctest::Approx(2.0));

  AmiseInputs flat = truth_of(m);
  flat.lambda_dd = [](double) { return 0.0; };
  CHECK_THROWS_AS(amise_bandwidth(flat, k, n, range), Error);
}

}
