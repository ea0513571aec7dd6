#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dthazard {

// One doubly truncated observation: lifetime x seen inside the window [u, v].
struct Observation {
  double u = 0.0;
  double x = 0.0;
  double v = 0.0;
};

// Validated, immutable collection of observations. Tied lifetimes are kept as
// distinct observations. When every window has the same width the sample is
// flagged as interval sampling and that width is exposed as tau().
class Sample {
 public:
  const std::vector<Observation>& observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }
  const Observation& operator[](std::size_t i) const { return obs_[i]; }

  std::optional<double> tau() const { return tau_; }
  bool interval_sampling() const { return tau_.has_value(); }

  std::vector<double> lifetimes() const;

  // Subsample induced by the given indices (kept in the given order).
  Sample subset(std::span<const std::size_t> indices) const;
  // Sample with observation `skip` removed.
  Sample without(std::size_t skip) const;

  friend Sample validate_sample(std::span<const Observation> raw);

 private:
  std::vector<Observation> obs_;
  std::optional<double> tau_;
};

// Checks u <= x <= v and finiteness for every triplet; throws ValidationError
// naming the first offending index. Detects constant window width.
Sample validate_sample(std::span<const Observation> raw);

// Applies t -> (t + shift) / scale jointly to u, x and v.
Sample affine_rescale(const Sample& sample, double shift, double scale);

// Detected common width of the windows, if any. Tolerance is
// 1e-9 * max(1, median width) around the median width.
std::optional<double> detect_interval_width(std::span<const Observation> raw);

// CSV with header "u,x,v". Lines starting with '#' are comments. Errors carry
// the 1-based line number of the failing row.
Sample read_sample_csv(std::istream& in);
Sample read_sample_csv_file(const std::string& path);
void write_sample_csv(std::ostream& out, const Sample& sample);

}  // namespace dthazard
