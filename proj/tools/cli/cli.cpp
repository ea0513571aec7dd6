#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dthazard/bandwidth.hpp"
#include "dthazard/bootstrap.hpp"
#include "dthazard/errors.hpp"
#include "dthazard/existence.hpp"
#include "dthazard/hazard.hpp"
#include "dthazard/kernel.hpp"
#include "dthazard/npmle.hpp"
#include "dthazard/parallel.hpp"
#include "dthazard/sample.hpp"
#include "dthazard/simulation.hpp"
#include "dthazard/spmle.hpp"

#ifndef DTHAZARD_VERSION
#define DTHAZARD_VERSION "0.0.0"
#endif

namespace dthazard::cli {

namespace {

using Json = nlohmann::ordered_json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kExitUsage;
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kExistence: return kExitExistence;
    case ErrorKind::kNumerical: return kExitInternal;
  }
  return kExitInternal;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kUsage, "cannot parse " + what + " value '" + s + "'");
  }
}

std::pair<double, double> parse_pair(const std::string& s, const std::string& what) {
  const auto p = split(s, ',');
  if (p.size() != 2) throw Error(ErrorKind::kUsage, what + " expects two values 'a,b'");
  return {to_double(p[0], what), to_double(p[1], what)};
}

struct GridSpec {
  std::optional<double> lo;
  std::optional<double> hi;
  std::size_t count = 256;
};

// "k" or "lo:hi:k".
GridSpec parse_grid(const std::string& s, std::size_t default_count) {
  GridSpec g;
  g.count = default_count;
  if (s.empty()) return g;
  const auto p = split(s, ':');
  auto count = [&](const std::string& c) {
    const double v = to_double(c, "grid count");
    if (!(v >= 2.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw Error(ErrorKind::kUsage, "grid count must be an integer >= 2");
    return static_cast<std::size_t>(v);
  };
  if (p.size() == 1) {
    g.count = count(p[0]);
  } else if (p.size() == 3) {
    g.lo = to_double(p[0], "grid");
    g.hi = to_double(p[1], "grid");
    g.count = count(p[2]);
    if (!(*g.lo < *g.hi)) throw Error(ErrorKind::kUsage, "grid needs lo < hi");
  } else {
    throw Error(ErrorKind::kUsage, "grid spec must be 'k' or 'lo:hi:k'");
  }
  return g;
}

// "lo:hi:k", geometric spacing.
std::vector<double> parse_h_grid(const std::string& s) {
  const GridSpec g = parse_grid(s, 30);
  if (!g.lo) throw Error(ErrorKind::kUsage, "bandwidth grid must be 'lo:hi:k'");
  return geometric_grid(*g.lo, *g.hi, g.count);
}

// ---------------------------------------------------------------- output

std::string metadata_header(const std::string& command, const Json& config) {
  std::string h;
  h += "# dthazard " DTHAZARD_VERSION "\n";
  h += "# command: " + command + "\n";
  h += "# config: " + config.dump() + "\n";
  return h;
}

Json metadata_json(const std::string& command, const Json& config) {
  Json m;
  m["tool"] = "dthazard";
  m["version"] = DTHAZARD_VERSION;
  m["command"] = command;
  m["config"] = config;
  return m;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorKind::kUsage, "cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_ && !*file_) throw Error(ErrorKind::kNumerical, "failed writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void write_curve_csv(const std::string& path, std::ostream& out, const std::string& header,
                     const std::vector<double>& grid, const std::vector<double>& values,
                     const std::vector<double>* lower, const std::vector<double>* upper,
                     const std::string& value_name = "value") {
  Sink sink(path, out);
  auto& os = sink.stream();
  os << header;
  os << "x," << value_name << (lower ? ",lo,hi" : "") << "\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << num(grid[k]) << "," << num(values[k]);
    if (lower) os << "," << num((*lower)[k]) << "," << num((*upper)[k]);
    os << "\n";
  }
  sink.close();
}

void write_json(const std::string& path, std::ostream& out, const Json& j) {
  Sink sink(path, out);
  sink.stream() << j.dump(2) << "\n";
  sink.close();
}

// JSON goes to --summary, or to stdout when the main output went to a file.
void emit_summary(const std::string& summary, const std::string& output, std::ostream& out,
                  const Json& j) {
  if (!summary.empty()) {
    write_json(summary, out, j);
  } else if (output != "-") {
    write_json("-", out, j);
  }
}

Json to_json(const std::vector<std::size_t>& v) {
  Json a = Json::array();
  for (std::size_t x : v) a.push_back(x);
  return a;
}

Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

// ---------------------------------------------------------------- options

struct InputOptions {
  std::string input;
  std::string transform;

  void add(CLI::App* app) {
    app->add_option("input", input, "CSV file with header u,x,v ('-' for stdin)")->required();
    app->add_option("--transform", transform, "affine map t -> (t + a) / b, given as 'a,b'");
  }

  Sample load(Json& config) const {
    Sample s = input == "-" ? read_sample_csv(std::cin) : read_sample_csv_file(input);
    config["input"] = input;
    if (!transform.empty()) {
      const auto [a, b] = parse_pair(transform, "--transform");
      s = affine_rescale(s, a, b);
      config["transform"] = {{"shift", a}, {"scale", b}};
    }
    return s;
  }
};

struct FitOptions {
  std::string kind = "np";
  std::string family = "beta";
  std::string fix;
  std::optional<double> tau;

  void add(CLI::App* app, const std::string& kinds) {
    app->add_option("--kind", kind, "estimator: " + kinds)->capture_default_str();
    app->add_option("--family", family, "truncation family for sp: beta|beta1|uniform")
        ->capture_default_str();
    app->add_option("--fix", fix, "fixed uniform bounds 'a=...,b=...' (family uniform)");
    app->add_option("--tau", tau, "interval width override (default: detected)");
  }

  ParametricFamily resolve_family() const {
    if (fix.empty()) return ParametricFamily::from_name(family);
    if (family != "uniform") throw Error(ErrorKind::kUsage, "--fix applies to --family uniform");
    std::optional<double> a, b;
    for (const auto& item : split(fix, ',')) {
      const auto kv = split(item, '=');
      if (kv.size() != 2) throw Error(ErrorKind::kUsage, "--fix expects 'a=...,b=...'");
      if (kv[0] == "a") a = to_double(kv[1], "--fix a");
      else if (kv[0] == "b") b = to_double(kv[1], "--fix b");
      else throw Error(ErrorKind::kUsage, "--fix knows parameters a and b only");
    }
    if (!a || !b) throw Error(ErrorKind::kUsage, "--fix needs both a and b");
    return ParametricFamily::uniform_fixed(*a, *b);
  }
};

struct Fitted {
  EstimatorKind kind = EstimatorKind::kNp;
  Sample sample;
  std::optional<NpmleFit> np;
  std::optional<SpmleFit> sp;
  Json summary;
};

Json np_summary(const NpmleFit& f) {
  Json j;
  j["estimator"] = "npmle";
  j["exists_unique"] = f.exists_unique;
  j["alpha"] = f.alpha_n;
  j["loglik"] = f.loglik;
  j["iterations"] = f.iterations;
  j["converged"] = f.converged;
  return j;
}

Json sp_summary(const SpmleFit& f) {
  Json j;
  j["estimator"] = "spmle";
  j["law"] = f.law->name();
  Json theta;
  const auto names = f.law->parameter_names();
  for (std::size_t k = 0; k < names.size() && k < f.theta_hat.size(); ++k)
    theta[names[k]] = f.theta_hat[k];
  j["theta"] = theta;
  if (f.tau()) j["tau"] = *f.tau();
  j["alpha"] = f.alpha_sp;
  j["cond_loglik"] = f.cond_loglik;
  j["restarts"] = f.trace.restarts;
  j["best_restart"] = f.trace.best_restart;
  if (!f.warning.empty()) j["warning"] = f.warning;
  return j;
}

Fitted fit_sample(const Sample& sample, const FitOptions& opt, Json& config, bool allow_naive) {
  Fitted f;
  f.kind = estimator_kind_from_name(opt.kind);
  f.sample = sample;
  config["kind"] = opt.kind;
  switch (f.kind) {
    case EstimatorKind::kNp: {
      f.np = fit_npmle(sample);
      if (!f.np->exists_unique)
        throw Error(ErrorKind::kExistence,
                    f.np->warning.empty()
                        ? "NPMLE existence/uniqueness fails; run 'dthazard check --extract-largest'"
                        : f.np->warning +
                              "; run 'dthazard check --extract-largest' to obtain a valid "
                              "subsample");
      f.summary = np_summary(*f.np);
      break;
    }
    case EstimatorKind::kSp: {
      const ParametricFamily family = opt.resolve_family();
      config["family"] = family.name();
      if (family.fixed()) config["fix"] = to_json(family.fixed_params());
      if (opt.tau) config["tau"] = *opt.tau;
      f.sp = fit_spmle(sample, family, opt.tau);
      f.summary = sp_summary(*f.sp);
      break;
    }
    case EstimatorKind::kNaive:
      if (!allow_naive) throw Error(ErrorKind::kUsage, "this command needs --kind np or sp");
      f.summary = {{"estimator", "naive"}};
      break;
    case EstimatorKind::kOracle:
      throw Error(ErrorKind::kUsage, "the oracle estimator needs a known G (simulate only)");
  }
  return f;
}

struct SmoothOptions {
  std::optional<double> h;
  std::string h_grid;
  std::string range;
  std::string kernel = "epanechnikov";
  std::string grid;

  void add(CLI::App* app) {
    app->add_option("--h", h, "bandwidth (default: LSCV)");
    app->add_option("--h-grid", h_grid, "LSCV bandwidth grid 'lo:hi:k' (geometric)");
    app->add_option("--range", range, "LSCV integration range 'lo,hi'");
    app->add_option("--kernel", kernel, "epanechnikov|gaussian")->capture_default_str();
    app->add_option("--grid", grid, "evaluation grid 'k' or 'lo:hi:k' (default 256 over data)");
  }
};

BandwidthSearch run_lscv(const Fitted& f, const SmoothOptions& s, const KernelSpec& kernel,
                         std::size_t threads, Json& config) {
  LscvOptions o;
  o.kernel = kernel;
  o.threads = threads;
  if (!s.range.empty()) {
    o.integration_range = parse_pair(s.range, "--range");
    config["range"] = {o.integration_range->first, o.integration_range->second};
  }
  const std::vector<double> grid =
      s.h_grid.empty() ? default_h_grid(f.sample, kernel) : parse_h_grid(s.h_grid);
  config["h_grid"] = s.h_grid.empty() ? Json("default") : Json(s.h_grid);
  switch (f.kind) {
    case EstimatorKind::kNp: return select_bandwidth(*f.np, grid, o);
    case EstimatorKind::kSp: return select_bandwidth(*f.sp, grid, o);
    default: return select_bandwidth_naive(f.sample, grid, o);
  }
}

Json search_summary(const BandwidthSearch& b) {
  Json j;
  j["h_star"] = b.h_star;
  j["integration_range"] = {b.integration_range.first, b.integration_range.second};
  j["grid_min"] = b.h_grid.front();
  j["grid_max"] = b.h_grid.back();
  j["grid_points"] = b.h_grid.size();
  j["loo_used"] = b.loo_used;
  j["loo_skipped"] = to_json(b.loo_skipped);
  if (!b.warning.empty()) j["warning"] = b.warning;
  return j;
}

std::vector<double> eval_grid(const Sample& sample, const std::string& spec) {
  const GridSpec g = parse_grid(spec, 256);
  if (g.lo) return linspace(*g.lo, *g.hi, g.count);
  return default_grid(sample, g.count);
}

struct BandOptions {
  std::size_t B = 0;
  double level = 0.95;
  std::optional<double> h0;
  std::uint64_t max_rejections = 1'000'000;

  void add(CLI::App* app, bool required) {
    auto* o = app->add_option("--bands", B, "bootstrap replicates for pointwise bands");
    if (required) {
      B = 500;
      o->capture_default_str();
    }
    app->add_option("--level", level, "band coverage level")->capture_default_str();
    app->add_option("--h0", h0, "pilot bandwidth for the smoothed bootstrap (default: LSCV h)");
    app->add_option("--max-rejections", max_rejections, "rejection budget per bootstrap draw")
        ->capture_default_str();
  }
};

struct Common {
  std::string output = "-";
  std::string summary;
  std::optional<std::size_t> threads;
  std::uint64_t seed = 1;

  void add(CLI::App* app, bool with_seed) {
    app->add_option("-o,--output", output, "output file ('-' for stdout)")->capture_default_str();
    app->add_option("--summary", summary, "JSON summary file");
    app->add_option("--threads", threads, "worker threads (default: DT_HAZARD_THREADS or all)");
    if (with_seed) app->add_option("--seed", seed, "random seed")->capture_default_str();
  }
};

// ---------------------------------------------------------------- commands

int cmd_check(const InputOptions& in, const Common& common, const std::string& extract,
              std::string removed_path, std::ostream& out) {
  Json config;
  const Sample s = in.load(config);
  const ExistenceReport r = check_existence(s);
  if (!extract.empty()) config["extract_largest"] = extract;

  std::ostringstream text;
  text << "n: " << s.size() << "\n";
  text << "exists_unique: " << (r.exists_unique ? "true" : "false") << "\n";
  text << "strongly_connected_components: " << r.scc_count << "\n";
  text << "largest_component: " << r.largest_scc.size() << "\n";
  text << "necessary_condition_violations:";
  for (std::size_t j : r.necessary_violations) text << " " << j;
  text << "\n";

  Json j;
  j["meta"] = metadata_json("check", config);
  j["n"] = s.size();
  j["exists_unique"] = r.exists_unique;
  j["scc_count"] = r.scc_count;
  j["largest_scc_size"] = r.largest_scc.size();
  j["necessary_violations"] = to_json(r.necessary_violations);

  if (!extract.empty()) {
    const SubsampleResult sub = largest_valid_subsample(s);
    {
      Sink sink(extract, out);
      sink.stream() << metadata_header("check", config);
      write_sample_csv(sink.stream(), sub.sample);
      sink.close();
    }
    if (removed_path.empty()) removed_path = extract + ".removed.csv";
    {
      Sink sink(removed_path, out);
      sink.stream() << metadata_header("check", config) << "index\n";
      for (std::size_t i : sub.removed) sink.stream() << i << "\n";
      sink.close();
    }
    text << "extracted: " << sub.sample.size() << " kept, " << sub.removed.size()
         << " removed\n";
    j["kept"] = sub.sample.size();
    j["removed"] = to_json(sub.removed);
  }
  {
    Sink sink(common.output, out);
    sink.stream() << text.str();
    sink.close();
  }
  if (!common.summary.empty()) write_json(common.summary, out, j);
  return r.exists_unique ? kExitOk : kExitExistence;
}

int cmd_fit(const InputOptions& in, const FitOptions& fo, const Common& common,
            const std::string& cdf_path, std::ostream& out) {
  Json config;
  const Sample s = in.load(config);
  const Fitted f = fit_sample(s, fo, config, false);
  Json j;
  j["meta"] = metadata_json("fit", config);
  j["n"] = s.size();
  j["fit"] = f.summary;
  write_json(common.output, out, j);
  if (!cdf_path.empty()) {
    const WeightedDF df = f.np ? f.np->lifetime_df() : f.sp->lifetime_df();
    std::vector<double> values;
    for (double p : df.points()) values.push_back(df.cdf(p));
    write_curve_csv(cdf_path, out, metadata_header("fit", config), df.points(), values, nullptr,
                    nullptr, "cdf");
  }
  return kExitOk;
}

int cmd_hazard(const InputOptions& in, const FitOptions& fo, const SmoothOptions& so,
               const BandOptions& bo, const Common& common, const std::string& command,
               std::ostream& out) {
  Json config;
  const Sample s = in.load(config);
  const std::size_t threads = resolve_threads(common.threads);
  const Fitted f = fit_sample(s, fo, config, true);
  const KernelSpec kernel = KernelSpec::from_name(so.kernel);
  config["kernel"] = kernel.name();

  Json j;
  Json warnings = Json::array();
  if (f.sp && !f.sp->warning.empty()) warnings.push_back(f.sp->warning);
  double h = 0.0;
  Json bw;
  if (so.h) {
    h = *so.h;
    if (!(h > 0.0)) throw Error(ErrorKind::kUsage, "--h must be positive");
    config["h"] = h;
    bw["h"] = h;
    bw["source"] = "user";
  } else {
    const BandwidthSearch search = run_lscv(f, so, kernel, threads, config);
    h = search.h_star;
    bw = search_summary(search);
    bw["h"] = h;
    bw["source"] = "lscv";
    if (!search.warning.empty()) warnings.push_back(search.warning);
  }
  const auto grid = eval_grid(s, so.grid);
  config["grid"] = {{"lo", grid.front()}, {"hi", grid.back()}, {"count", grid.size()}};

  HazardCurve curve;
  switch (f.kind) {
    case EstimatorKind::kNp: curve = hazard_np(*f.np, h, kernel, grid); break;
    case EstimatorKind::kSp: curve = hazard_sp(*f.sp, h, kernel, grid); break;
    default: curve = hazard_naive(s, h, kernel, grid); break;
  }
  if (grid_near_boundary(grid, s, h, kernel))
    warnings.push_back("grid reaches within one bandwidth of the data range; estimates there "
                       "carry boundary bias");

  Json bands;
  if (bo.B > 0) {
    if (f.kind == EstimatorKind::kNaive)
      throw Error(ErrorKind::kUsage, "bands are available for --kind np or sp");
    BootstrapConfig bc;
    bc.B = bo.B;
    bc.level = bo.level;
    bc.pilot_h0 = bo.h0.value_or(h);
    bc.seed = common.seed;
    bc.max_rejections_per_draw = bo.max_rejections;
    bc.threads = threads;
    config["bands"] = {{"B", bc.B}, {"level", bc.level}, {"pilot_h0", bc.pilot_h0},
                       {"seed", bc.seed}, {"max_rejections", bc.max_rejections_per_draw}};
    BandResult detail;
    curve = f.np ? confidence_bands(*f.np, h, kernel, grid, bc, &detail)
                 : confidence_bands(*f.sp, h, kernel, grid, bc, &detail);
    bands = {{"B", bc.B}, {"level", bc.level}, {"used", detail.used},
             {"dropped", detail.dropped}, {"pilot_h0", bc.pilot_h0}, {"seed", bc.seed}};
  }

  const std::string header = metadata_header(command, config);
  write_curve_csv(common.output, out, header, curve.grid, curve.values,
                  curve.lower ? &*curve.lower : nullptr, curve.upper ? &*curve.upper : nullptr);

  j["meta"] = metadata_json(command, config);
  j["n"] = s.size();
  j["fit"] = f.summary;
  j["bandwidth"] = bw;
  if (!bands.is_null()) j["bands"] = bands;
  j["warnings"] = warnings;
  emit_summary(common.summary, common.output, out, j);
  return kExitOk;
}

int cmd_gfun(const InputOptions& in, const FitOptions& fo, const SmoothOptions& so,
             const BandOptions& bo, const Common& common, std::ostream& out) {
  Json config;
  const Sample s = in.load(config);
  const std::size_t threads = resolve_threads(common.threads);
  const Fitted f = fit_sample(s, fo, config, false);
  const KernelSpec kernel = KernelSpec::from_name(so.kernel);
  const auto grid = eval_grid(s, so.grid);
  config["grid"] = {{"lo", grid.front()}, {"hi", grid.back()}, {"count", grid.size()}};

  std::vector<double> g(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    g[k] = f.np ? biasing_G_np(*f.np, grid[k]) : f.sp->biasing(grid[k]);

  Json j;
  std::optional<BandResult> bands;
  if (bo.B > 0) {
    config["kernel"] = kernel.name();
    double h0 = 0.0;
    if (bo.h0) {
      h0 = *bo.h0;
    } else {
      h0 = run_lscv(f, so, kernel, threads, config).h_star;
    }
    BootstrapConfig bc;
    bc.B = bo.B;
    bc.level = bo.level;
    bc.pilot_h0 = h0;
    bc.seed = common.seed;
    bc.max_rejections_per_draw = bo.max_rejections;
    bc.threads = threads;
    config["bands"] = {{"B", bc.B}, {"level", bc.level}, {"pilot_h0", bc.pilot_h0},
                       {"seed", bc.seed}, {"max_rejections", bc.max_rejections_per_draw}};
    bands = f.np ? biasing_bands(*f.np, kernel, grid, bc) : biasing_bands(*f.sp, kernel, grid, bc);
    j["bands"] = {{"B", bc.B}, {"level", bc.level}, {"used", bands->used},
                  {"dropped", bands->dropped}, {"pilot_h0", bc.pilot_h0}, {"seed", bc.seed}};
  }
  write_curve_csv(common.output, out, metadata_header("gfun", config), grid, g,
                  bands ? &bands->lower : nullptr, bands ? &bands->upper : nullptr);
  j["meta"] = metadata_json("gfun", config);
  j["n"] = s.size();
  j["fit"] = f.summary;
  emit_summary(common.summary, common.output, out, j);
  return kExitOk;
}

int cmd_bandwidth(const InputOptions& in, const FitOptions& fo, const SmoothOptions& so,
                  const Common& common, std::ostream& out) {
  Json config;
  const Sample s = in.load(config);
  const std::size_t threads = resolve_threads(common.threads);
  const Fitted f = fit_sample(s, fo, config, true);
  const KernelSpec kernel = KernelSpec::from_name(so.kernel);
  config["kernel"] = kernel.name();
  const BandwidthSearch b = run_lscv(f, so, kernel, threads, config);
  {
    Sink sink(common.output, out);
    auto& os = sink.stream();
    os << metadata_header("bandwidth", config) << "h,score\n";
    for (std::size_t k = 0; k < b.h_grid.size(); ++k)
      os << num(b.h_grid[k]) << "," << num(b.scores[k]) << "\n";
    sink.close();
  }
  Json j;
  j["meta"] = metadata_json("bandwidth", config);
  j["n"] = s.size();
  j["fit"] = f.summary;
  j["bandwidth"] = search_summary(b);
  emit_summary(common.summary, common.output, out, j);
  return kExitOk;
}

struct SimulateOptions {
  std::string model = "m1";
  std::optional<double> a;
  std::size_t n = 100;
  std::size_t reps = 200;
  std::string h_grid = "0.02:0.4:25";
  std::string kinds = "np,sp";
  std::string out_dir = ".";
  std::string range;
  std::size_t ise_points = 201;
};

int cmd_simulate(const SimulateOptions& so, const Common& common, std::ostream& out) {
  const ModelSpec model = ModelSpec::from_name(so.model, so.a);
  if (so.n < 1) throw Error(ErrorKind::kUsage, "--n must be >= 1");
  if (so.reps < 1) throw Error(ErrorKind::kUsage, "--reps must be >= 1");
  StudyOptions opt;
  opt.reps = so.reps;
  opt.seed = common.seed;
  opt.threads = resolve_threads(common.threads);
  opt.h_grid = parse_h_grid(so.h_grid);
  opt.ise_points = so.ise_points;
  if (opt.ise_points < 2) throw Error(ErrorKind::kUsage, "--ise-points must be >= 2");
  opt.kinds.clear();
  for (const auto& k : split(so.kinds, ',')) opt.kinds.push_back(estimator_kind_from_name(k));
  if (!so.range.empty()) opt.ise_range = parse_pair(so.range, "--range");
  if (model.id() == ModelSpec::Id::kMisspec) opt.sp_family = ParametricFamily::beta_one();

  Json config;
  config["model"] = model.name();
  if (model.id() == ModelSpec::Id::kMisspec) config["a"] = model.misspec_a();
  config["n"] = so.n;
  config["reps"] = so.reps;
  config["seed"] = common.seed;
  config["h_grid"] = so.h_grid;
  config["kinds"] = so.kinds;
  config["ise_points"] = so.ise_points;
  config["sp_family"] = opt.sp_family.value_or(model.default_sp_family()).name();
  if (model.id() == ModelSpec::Id::kM2) config["m2_scale"] = "0.15 is a standard deviation";

  const StudyResult r = run_mise_study(model, so.n, opt);
  config["ise_range"] = {r.ise_range.first, r.ise_range.second};
  const std::string header = metadata_header("simulate", config);
  const std::string dir = so.out_dir.empty() ? "." : so.out_dir;

  {
    Sink sink(dir + "/summary.csv", out);
    auto& os = sink.stream();
    os << header << "model,n,kind,h_opt,min_mise,used,dropped\n";
    for (const auto& k : r.kinds)
      os << r.model << "," << r.n << "," << to_string(k.kind) << "," << num(k.h_opt) << ","
         << num(k.min_mise) << "," << k.used << "," << k.dropped << "\n";
    sink.close();
  }
  {
    Sink sink(dir + "/mise.csv", out);
    auto& os = sink.stream();
    os << header << "kind,h,mise,mise_se\n";
    for (const auto& k : r.kinds)
      for (std::size_t i = 0; i < r.h_grid.size(); ++i)
        os << to_string(k.kind) << "," << num(r.h_grid[i]) << "," << num(k.mise[i]) << ","
           << num(k.mise_se[i]) << "\n";
    sink.close();
  }
  {
    Sink sink(dir + "/quartiles.csv", out);
    auto& os = sink.stream();
    os << header << "kind,prob,x,truth,h,bias,variance,used\n";
    for (const auto& c : r.quartiles)
      os << to_string(c.kind) << "," << num(c.prob) << "," << num(c.x) << "," << num(c.truth)
         << "," << num(c.h) << "," << num(c.bias) << "," << num(c.variance) << "," << c.used
         << "\n";
    sink.close();
  }
  if (!r.ratio_sp_np.empty()) {
    Sink sink(dir + "/ratio.csv", out);
    auto& os = sink.stream();
    os << header << "h,ratio_sp_np\n";
    for (std::size_t i = 0; i < r.h_grid.size(); ++i)
      os << num(r.h_grid[i]) << "," << num(r.ratio_sp_np[i]) << "\n";
    sink.close();
  }

  Json j;
  j["meta"] = metadata_json("simulate", config);
  j["alpha"] = model.alpha();
  Json kinds = Json::array();
  for (const auto& k : r.kinds)
    kinds.push_back({{"kind", to_string(k.kind)},
                     {"h_opt", k.h_opt},
                     {"min_mise", k.min_mise},
                     {"used", k.used},
                     {"dropped", k.dropped}});
  j["kinds"] = kinds;
  write_json(common.summary.empty() ? "-" : common.summary, out, j);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hazard-rate estimation for doubly truncated data", "dthazard"};
  app.set_version_flag("--version", std::string(DTHAZARD_VERSION));
  app.require_subcommand(1);
  // "-h" stays free for the bandwidth option "--h".
  app.set_help_flag("--help", "print this help message and exit");

  // check
  InputOptions check_in;
  Common check_common;
  std::string extract, removed;
  auto* check = app.add_subcommand("check", "NPMLE existence and uniqueness report");
  check_in.add(check);
  check_common.add(check, false);
  check->add_option("--extract-largest", extract,
                    "write the largest subsample with a unique NPMLE to this CSV");
  check->add_option("--removed", removed,
                    "indices removed by --extract-largest (default: <file>.removed.csv)");

  // fit
  InputOptions fit_in;
  FitOptions fit_opt;
  Common fit_common;
  std::string cdf_path;
  auto* fit = app.add_subcommand("fit", "fit the NPMLE or SPMLE and print a JSON summary");
  fit_in.add(fit);
  fit_opt.add(fit, "np|sp");
  fit_common.add(fit, false);
  fit->add_option("--cdf", cdf_path, "write the fitted lifetime CDF at the data points");

  // hazard and bands
  struct HazardParts {
    InputOptions in;
    FitOptions fit;
    SmoothOptions smooth;
    BandOptions bands;
    Common common;
  };
  HazardParts hz, bd;
  auto* hazard = app.add_subcommand("hazard", "kernel hazard estimate on a grid");
  auto* bands = app.add_subcommand("bands", "hazard estimate with bootstrap bands");
  for (auto [sub, parts, need] : {std::tuple{hazard, &hz, false}, std::tuple{bands, &bd, true}}) {
    parts->in.add(sub);
    parts->fit.add(sub, "np|sp|naive");
    parts->smooth.add(sub);
    parts->bands.add(sub, need);
    parts->common.add(sub, true);
  }

  // gfun
  HazardParts gf;
  auto* gfun = app.add_subcommand("gfun", "biasing function G on a grid");
  gf.in.add(gfun);
  gf.fit.add(gfun, "np|sp");
  gf.smooth.add(gfun);
  gf.bands.add(gfun, false);
  gf.common.add(gfun, true);

  // bandwidth
  HazardParts bw;
  auto* bandwidth = app.add_subcommand("bandwidth", "LSCV bandwidth trace and selection");
  bw.in.add(bandwidth);
  bw.fit.add(bandwidth, "np|sp|naive");
  bw.smooth.add(bandwidth);
  bw.common.add(bandwidth, false);

  // simulate
  SimulateOptions sim;
  Common sim_common;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MISE study");
  simulate->add_option("--model", sim.model, "m1|m2|m31|m32|m33|misspec")->capture_default_str();
  simulate->add_option("--a", sim.a, "Beta(1, a) truncation parameter for --model misspec");
  simulate->add_option("--n", sim.n, "sample size")->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Monte Carlo replicates")->capture_default_str();
  simulate->add_option("--h-grid", sim.h_grid, "bandwidth grid 'lo:hi:k' (geometric)")
      ->capture_default_str();
  simulate->add_option("--kinds", sim.kinds, "estimators: np,sp,naive,oracle")
      ->capture_default_str();
  simulate->add_option("--out-dir", sim.out_dir, "directory for the CSV tables")
      ->capture_default_str();
  simulate->add_option("--range", sim.range, "ISE integration range 'lo,hi'");
  simulate->add_option("--ise-points", sim.ise_points, "ISE grid points")->capture_default_str();
  sim_common.add(simulate, true);
  simulate->remove_option(simulate->get_option("--output"));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(check_in, check_common, extract, removed, out);
    if (fit->parsed()) return cmd_fit(fit_in, fit_opt, fit_common, cdf_path, out);
    if (hazard->parsed())
      return cmd_hazard(hz.in, hz.fit, hz.smooth, hz.bands, hz.common, "hazard", out);
    if (bands->parsed()) {
      if (bd.bands.B < 1) throw Error(ErrorKind::kUsage, "bands needs --bands >= 1");
      return cmd_hazard(bd.in, bd.fit, bd.smooth, bd.bands, bd.common, "bands", out);
    }
    if (gfun->parsed()) return cmd_gfun(gf.in, gf.fit, gf.smooth, gf.bands, gf.common, out);
    if (bandwidth->parsed()) return cmd_bandwidth(bw.in, bw.fit, bw.smooth, bw.common, out);
    if (simulate->parsed()) return cmd_simulate(sim, sim_common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace dthazard::cli
