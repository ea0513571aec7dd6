#pragma once

// Independent brute-force references used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "dthazard/rng.hpp"
#include "dthazard/sample.hpp"

namespace dthazard::oracle {

// Edge i -> j iff u_i <= x_j <= v_i, straight from the definition.
inline std::vector<std::vector<bool>> adjacency(const Sample& s) {
  const std::size_t n = s.size();
  std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = s[i].u <= s[j].x && s[j].x <= s[i].v;
  return a;
}

// Reflexive-transitive closure by Floyd-Warshall.
inline std::vector<std::vector<bool>> reachability(const Sample& s) {
  auto r = adjacency(s);
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

inline bool strongly_connected(const Sample& s) {
  const auto r = reachability(s);
  for (const auto& row : r)
    for (bool b : row)
      if (!b) return false;
  return true;
}

// Mutual-reachability classes, each sorted, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> components(const Sample& s) {
  const auto r = reachability(s);
  const std::size_t n = s.size();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> c;
    for (std::size_t j = i; j < n; ++j)
      if (r[i][j] && r[j][i]) {
        c.push_back(j);
        seen[j] = true;
      }
    out.push_back(c);
  }
  return out;
}

// log prod_j phi_j / Phi_j with Phi_j the phi-mass inside window j.
inline double conditional_loglik(const Sample& s, const std::vector<double>& phi) {
  double ll = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    double big = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m)
      if (s[j].u <= s[m].x && s[m].x <= s[j].v) big += phi[m];
    if (!(phi[j] > 0.0) || !(big > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += std::log(phi[j]) - std::log(big);
  }
  return ll;
}

// Maximizes conditional_loglik over the simplex grid {k / units}. The first
// n - 1 coordinates range over [center - radius, center + radius] (in grid
// units, clipped); the last one takes the remaining mass.
inline std::vector<double> simplex_grid_search(const Sample& s, std::int64_t units,
                                               const std::vector<std::int64_t>& center,
                                               std::int64_t radius) {
  const std::size_t n = s.size();
  std::vector<std::int64_t> k(n, 0), best_k(n, 0);
  std::vector<double> phi(n);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t d, std::int64_t used) {
    if (d + 1 == n) {
      k[d] = units - used;
      if (k[d] <= 0) return;
      for (std::size_t i = 0; i < n; ++i) phi[i] = static_cast<double>(k[i]) / units;
      const double ll = conditional_loglik(s, phi);
      if (ll > best) {
        best = ll;
        best_k = k;
      }
      return;
    }
    const std::int64_t lo = std::max<std::int64_t>(1, center[d] - radius);
    const std::int64_t hi = std::min<std::int64_t>(units - used - 1, center[d] + radius);
    for (std::int64_t v = lo; v <= hi; ++v) {
      k[d] = v;
      rec(d + 1, used + v);
    }
  };
  rec(0, 0);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(best_k[i]) / units;
  return out;
}

// Coarse-to-fine simplex grid search ending at step 1/final_units: a full
// grid at step 1/40, then windows of +-2 coarse steps at 1/200 and +-3
// steps at 1/final_units around the incumbent.
inline std::vector<double> brute_force_npmle(const Sample& s, std::int64_t final_units = 1000) {
  const std::size_t n = s.size();
  auto scaled = [&](const std::vector<double>& phi, std::int64_t units) {
    std::vector<std::int64_t> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = std::llround(phi[i] * static_cast<double>(units));
    return c;
  };
  std::vector<double> phi = simplex_grid_search(s, 40, std::vector<std::int64_t>(n, 0), 40);
  phi = simplex_grid_search(s, 200, scaled(phi, 200), 10);
  phi = simplex_grid_search(s, final_units, scaled(phi, final_units),
                            3 * final_units / 200);
  return phi;
}

// Random observable triplets with continuous coordinates.
inline Sample random_sample(std::size_t n, RandomStream& rng, double width_lo = 0.2,
                            double width_hi = 0.8) {
  std::vector<Observation> obs(n);
  for (auto& o : obs) {
    o.x = rng.uniform();
    const double w = rng.uniform(width_lo, width_hi);
    o.u = o.x - w * rng.uniform();
    o.v = o.u + w;
  }
  return validate_sample(obs);
}

// Random triplets on a small integer lattice, so ties and boundary contacts
// occur often.
inline Sample random_lattice_sample(std::size_t n, RandomStream& rng, int span = 10) {
  std::vector<Observation> obs(n);
  for (auto& o : obs) {
    o.x = static_cast<double>(rng.below(static_cast<std::uint64_t>(span) + 1));
    o.u = o.x - static_cast<double>(rng.below(4));
    o.v = o.x + static_cast<double>(rng.below(4));
  }
  return validate_sample(obs);
}

}  // namespace dthazard::oracle
