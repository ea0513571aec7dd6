#include "dthazard/existence.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace dthazard {

std::vector<std::size_t> ObservationDigraph::in_degrees() const {
  // Difference array over sorted positions, then map back to vertices.
  const std::size_t n = size();
  std::vector<long long> diff(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++diff[index_.lo[i]];
    --diff[index_.hi[i]];
  }
  std::vector<std::size_t> out(n);
  long long running = 0;
  for (std::size_t r = 0; r < n; ++r) {
    running += diff[r];
    out[index_.order[r]] = static_cast<std::size_t>(running);
  }
  return out;
}

ObservationDigraph build_graph(const Sample& sample) { return ObservationDigraph(sample); }

std::vector<std::vector<std::size_t>> strongly_connected_components(
    const ObservationDigraph& graph) {
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  const std::size_t n = graph.size();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  // Explicit DFS frames: (vertex, position within its successor block).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      const auto succ = graph.successors(v);
      if (pos < succ.size()) {
        const std::size_t w = succ[pos++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::vector<std::size_t> comp;
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  }
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return components;
}

namespace {

const std::vector<std::size_t>& pick_largest(
    const std::vector<std::vector<std::size_t>>& components) {
  // Components are ordered by smallest member, so the first maximum wins ties.
  const auto it = std::max_element(
      components.begin(), components.end(),
      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return *it;
}

}  // namespace

ExistenceReport check_existence(const Sample& sample) {
  const ObservationDigraph graph = build_graph(sample);
  const auto components = strongly_connected_components(graph);
  ExistenceReport report;
  report.scc_count = components.size();
  report.exists_unique = components.size() == 1;
  report.largest_scc = pick_largest(components);
  report.window_counts = graph.in_degrees();
  report.covered_counts.resize(graph.size());
  for (std::size_t j = 0; j < graph.size(); ++j) {
    report.covered_counts[j] = graph.out_degree(j);
    // A single observation is trivially strongly connected.
    if (graph.size() > 1 && (report.window_counts[j] == 1 || report.covered_counts[j] == 1))
      report.necessary_violations.push_back(j);
  }
  return report;
}

SubsampleResult largest_valid_subsample(const Sample& sample) {
  const auto components = strongly_connected_components(build_graph(sample));
  const auto& keep = pick_largest(components);
  std::vector<std::size_t> removed;
  std::vector<char> in_keep(sample.size(), 0);
  for (std::size_t i : keep) in_keep[i] = 1;
  for (std::size_t i = 0; i < sample.size(); ++i)
    if (!in_keep[i]) removed.push_back(i);
  return SubsampleResult{sample.subset(keep), keep, std::move(removed)};
}

}  // namespace dthazard
