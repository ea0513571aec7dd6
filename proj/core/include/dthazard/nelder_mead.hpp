#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace dthazard {

struct NelderMeadOptions {
  double initial_step = 0.5;
  double diameter_tol = 1e-7;  // stop when max vertex distance to best < tol
  std::size_t max_steps = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Derivative-free simplex minimization. The objective may return +inf to mark
// infeasible points; such vertices are always ranked worst.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start,
                                    const NelderMeadOptions& opt = {}) {
  const std::size_t d = start.size();
  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& p) {
    ++res.evaluations;
    const double v = f(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  if (d == 0) {
    res.value = eval(start);
    res.x = std::move(start);
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> pts(d + 1, start);
  for (std::size_t k = 0; k < d; ++k) pts[k + 1][k] += opt.initial_step;
  std::vector<double> vals(d + 1);
  for (std::size_t k = 0; k <= d; ++k) vals[k] = eval(pts[k]);

  std::vector<std::size_t> idx(d + 1);
  auto order = [&] {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
  };
  auto diameter = [&] {
    double diam = 0.0;
    const auto& best = pts[idx[0]];
    for (std::size_t k = 1; k <= d; ++k) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += (pts[idx[k]][c] - best[c]) * (pts[idx[k]][c] - best[c]);
      diam = std::max(diam, std::sqrt(s));
    }
    return diam;
  };
  auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
    std::vector<double> p(d);
    for (std::size_t c = 0; c < d; ++c) p[c] = from[c] + t * (to[c] - from[c]);
    return p;
  };

  order();
  while (res.steps < opt.max_steps) {
    if (diameter() < opt.diameter_tol) {
      res.converged = true;
      break;
    }
    ++res.steps;
    const std::size_t best = idx[0], worst = idx[d], second = idx[d - 1];
    std::vector<double> centroid(d, 0.0);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t c = 0; c < d; ++c) centroid[c] += pts[idx[k]][c] / static_cast<double>(d);

    const auto reflected = along(centroid, pts[worst], -1.0);
    const double fr = eval(reflected);
    if (fr < vals[best]) {
      const auto expanded = along(centroid, pts[worst], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const auto contracted = outside ? along(centroid, reflected, 0.5)
                                      : along(centroid, pts[worst], 0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (std::size_t k = 1; k <= d; ++k) {
          pts[idx[k]] = along(pts[best], pts[idx[k]], 0.5);
          vals[idx[k]] = eval(pts[idx[k]]);
        }
      }
    }
    order();
  }
  if (!res.converged && diameter() < opt.diameter_tol) res.converged = true;
  res.x = pts[idx[0]];
  res.value = vals[idx[0]];
  return res;
}

}  // namespace dthazard
