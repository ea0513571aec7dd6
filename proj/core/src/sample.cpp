#include "dthazard/sample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dthazard/errors.hpp"

namespace dthazard {

std::vector<double> Sample::lifetimes() const {
  std::vector<double> x(obs_.size());
  std::transform(obs_.begin(), obs_.end(), x.begin(),
                 [](const Observation& o) { return o.x; });
  return x;
}

Sample Sample::subset(std::span<const std::size_t> indices) const {
  std::vector<Observation> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(obs_.at(i));
  return validate_sample(picked);
}

Sample Sample::without(std::size_t skip) const {
  std::vector<Observation> kept;
  kept.reserve(obs_.size());
  for (std::size_t i = 0; i < obs_.size(); ++i)
    if (i != skip) kept.push_back(obs_[i]);
  return validate_sample(kept);
}

std::optional<double> detect_interval_width(std::span<const Observation> raw) {
  if (raw.empty()) return std::nullopt;
  std::vector<double> widths(raw.size());
  std::transform(raw.begin(), raw.end(), widths.begin(),
                 [](const Observation& o) { return o.v - o.u; });
  std::vector<double> sorted = widths;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
    median = 0.5 * (median + lower);
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(median));
  for (double w : widths)
    if (std::abs(w - median) >= tol) return std::nullopt;
  return median;
}

Sample validate_sample(std::span<const Observation> raw) {
  if (raw.empty()) throw Error(ErrorKind::kData, "sample is empty");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Observation& o = raw[i];
    if (!std::isfinite(o.u) || !std::isfinite(o.x) || !std::isfinite(o.v))
      throw ValidationError(i, "non-finite value at index " + std::to_string(i));
    if (!(o.u <= o.x && o.x <= o.v))
      throw ValidationError(i, "observability violated at index " + std::to_string(i));
  }
  Sample s;
  s.obs_.assign(raw.begin(), raw.end());
  s.tau_ = detect_interval_width(raw);
  return s;
}

Sample affine_rescale(const Sample& sample, double shift, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(shift))
    throw Error(ErrorKind::kUsage, "affine_rescale requires a finite scale > 0");
  std::vector<Observation> out(sample.size());
  std::transform(sample.observations().begin(), sample.observations().end(), out.begin(),
                 [&](const Observation& o) {
                   return Observation{(o.u + shift) / scale, (o.x + shift) / scale,
                                      (o.v + shift) / scale};
                 });
  return validate_sample(out);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(const std::string& field, std::size_t line_no) {
  const std::string t = trim(field);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size())
    throw Error(ErrorKind::kData,
                "line " + std::to_string(line_no) + ": cannot parse number '" + t + "'");
  return value;
}

}  // namespace

Sample read_sample_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<Observation> rows;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : t)
        if (c != ' ' && c != '\t') compact.push_back(c);
      if (compact != "u,x,v")
        throw Error(ErrorKind::kData, "line " + std::to_string(line_no) +
                                          ": expected header 'u,x,v'");
      header_seen = true;
      continue;
    }
    std::stringstream ss(t);
    std::string a, b, c, extra;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
        std::getline(ss, extra, ','))
      throw Error(ErrorKind::kData,
                  "line " + std::to_string(line_no) + ": expected 3 comma-separated fields");
    rows.push_back({parse_field(a, line_no), parse_field(b, line_no), parse_field(c, line_no)});
    row_lines.push_back(line_no);
  }
  if (!header_seen) throw Error(ErrorKind::kData, "missing header 'u,x,v'");
  try {
    return validate_sample(rows);
  } catch (const ValidationError& e) {
    throw ValidationError(e.index(),
                          "line " + std::to_string(row_lines[e.index()]) + ": " + e.what());
  }
}

Sample read_sample_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kData, "cannot open '" + path + "'");
  return read_sample_csv(in);
}

void write_sample_csv(std::ostream& out, const Sample& sample) {
  const auto old_precision = out.precision(17);
  out << "u,x,v\n";
  for (const Observation& o : sample.observations())
    out << o.u << ',' << o.x << ',' << o.v << '\n';
  out.precision(old_precision);
}

}  // namespace dthazard
