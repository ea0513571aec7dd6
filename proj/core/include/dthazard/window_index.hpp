#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dthazard/sample.hpp"

namespace dthazard {

// Sorted view of the lifetimes plus, for every window [u_i, v_i], the
// half-open range of sorted positions whose lifetimes fall inside it
// (closed interval membership). Row i of the indicator matrix J_im is
// therefore the contiguous block order[lo[i] .. hi[i]).
struct WindowIndex {
  std::vector<std::size_t> order;   // observation indices sorted by x (stable)
  std::vector<std::size_t> rank;    // inverse permutation of order
  std::vector<double> sorted_x;
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;

  explicit WindowIndex(const Sample& sample);

  std::size_t size() const { return order.size(); }
  bool contains(std::size_t window, std::size_t obs) const {
    const std::size_t r = rank[obs];
    return lo[window] <= r && r < hi[window];
  }
};

}  // namespace dthazard
