#include "doctest.h"
#include "dthazard/existence.hpp"
#include "support/oracles.hpp"

using namespace dthazard;

TEST_SUITE("existence") {

TEST_CASE("edges follow the window definition") {
  RandomStream rng(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const Sample s = oracle::random_lattice_sample(1 + rng.below(12), rng);
    const auto adj = oracle::adjacency(s);
    const ObservationDigraph g = build_graph(s);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) REQUIRE(g.has_edge(i, j) == adj[i][j]);
  }
}

TEST_CASE("components match transitive closure") {
  RandomStream rng(12, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const Sample s = rep % 2 ? oracle::random_lattice_sample(1 + rng.below(12), rng)
                             : oracle::random_sample(1 + rng.below(12), rng, 0.05, 0.5);
    const auto expected = oracle::components(s);
    CHECK(strongly_connected_components(build_graph(s)) == expected);
    const ExistenceReport r = check_existence(s);
    CHECK(r.exists_unique == oracle::strongly_connected(s));
    CHECK(r.scc_count == expected.size());
  }
}

TEST_CASE("in-degree one violates the necessary condition") {
  // The first window holds only its own lifetime.
  const std::vector<Observation> raw{{0.0, 0.1, 0.2}, {0.5, 0.6, 0.7}, {0.55, 0.65, 0.8}};
  const ExistenceReport r = check_existence(validate_sample(raw));
  CHECK_FALSE(r.exists_unique);
  CHECK(r.scc_count == 2);
  CHECK(r.window_counts[0] == 1);
  CHECK(r.largest_scc == std::vector<std::size_t>{1, 2});
  CHECK_FALSE(r.necessary_violations.empty());
}

TEST_CASE("one-way chain has singleton components") {
  const std::vector<Observation> raw{{0.0, 0.1, 0.5}, {0.3, 0.4, 0.6}};
  const Sample s = validate_sample(raw);
  const ExistenceReport r = check_existence(s);
  CHECK_FALSE(r.exists_unique);
  CHECK(r.scc_count == 2);
  const SubsampleResult sub = largest_valid_subsample(s);
  CHECK(sub.kept == std::vector<std::size_t>{0});
  CHECK(sub.removed == std::vector<std::size_t>{1});
}

TEST_CASE("largest component subsample is strongly connected") {
  RandomStream rng(13, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const Sample s = oracle::random_sample(4 + rng.below(20), rng, 0.05, 0.3);
    const SubsampleResult sub = largest_valid_subsample(s);
    CHECK(sub.kept.size() + sub.removed.size() == s.size());
    CHECK(oracle::strongly_connected(sub.sample));
    std::size_t biggest = 0;
    for (const auto& c : oracle::components(s)) biggest = std::max(biggest, c.size());
    CHECK(sub.kept.size() == biggest);
  }
}

TEST_CASE("scales to large samples") {
  RandomStream rng(14, 0);
  const Sample s = oracle::random_sample(20000, rng, 0.2, 0.5);
  const ExistenceReport r = check_existence(s);
  CHECK(r.largest_scc.size() <= s.size());
}

}
