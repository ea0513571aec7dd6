#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dthazard/sample.hpp"
#include "dthazard/window_index.hpp"

namespace dthazard {

// Observation digraph: vertex i has an edge to j iff u_i <= x_j <= v_i.
// Every vertex has a self-loop. Adjacency is stored implicitly: the
// out-neighbours of i are a contiguous block of the lifetime-sorted order.
class ObservationDigraph {
 public:
  explicit ObservationDigraph(const Sample& sample) : index_(sample) {}

  std::size_t size() const { return index_.size(); }
  bool has_edge(std::size_t from, std::size_t to) const { return index_.contains(from, to); }
  std::span<const std::size_t> successors(std::size_t i) const {
    return std::span<const std::size_t>(index_.order).subspan(index_.lo[i],
                                                               index_.hi[i] - index_.lo[i]);
  }
  std::size_t out_degree(std::size_t i) const { return index_.hi[i] - index_.lo[i]; }
  // Number of windows containing x_j (S_j in the usual notation).
  std::vector<std::size_t> in_degrees() const;

 private:
  WindowIndex index_;
};

ObservationDigraph build_graph(const Sample& sample);

struct ExistenceReport {
  bool exists_unique = false;
  std::size_t scc_count = 0;
  std::vector<std::size_t> largest_scc;            // sorted original indices
  std::vector<std::size_t> necessary_violations;   // j with S_j == 1 or S~_j == 1
  std::vector<std::size_t> window_counts;          // S_j
  std::vector<std::size_t> covered_counts;         // S~_j
};

// Strongly connected components, each as a sorted list of vertex indices.
// Components are ordered by their smallest member.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const ObservationDigraph& graph);

ExistenceReport check_existence(const Sample& sample);

struct SubsampleResult {
  Sample sample;
  std::vector<std::size_t> kept;     // original indices, increasing
  std::vector<std::size_t> removed;  // original indices, increasing
};

// Largest subsample on which the NPMLE exists and is unique: the largest
// strongly connected component (ties go to the component holding the
// smallest original index). Induced subgraphs of an SCC are never larger
// strongly connected sets, so this is a maximum-cardinality choice.
SubsampleResult largest_valid_subsample(const Sample& sample);

}  // namespace dthazard
