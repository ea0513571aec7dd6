#include "dthazard/window_index.hpp"

#include <algorithm>
#include <numeric>

namespace dthazard {

WindowIndex::WindowIndex(const Sample& sample) {
  const std::size_t n = sample.size();
  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sample[a].x < sample[b].x; });
  rank.resize(n);
  sorted_x.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    rank[order[r]] = r;
    sorted_x[r] = sample[order[r]].x;
  }
  lo.resize(n);
  hi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = static_cast<std::size_t>(
        std::lower_bound(sorted_x.begin(), sorted_x.end(), sample[i].u) - sorted_x.begin());
    hi[i] = static_cast<std::size_t>(
        std::upper_bound(sorted_x.begin(), sorted_x.end(), sample[i].v) - sorted_x.begin());
  }
}

}  // namespace dthazard
