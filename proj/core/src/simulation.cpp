#include "dthazard/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "dthazard/errors.hpp"
#include "dthazard/numeric.hpp"
#include "dthazard/parallel.hpp"

namespace dthazard {

namespace {

constexpr double kShift = 0.25;
constexpr double kScale = 0.75;
constexpr double kBetaShape = 0.75;
constexpr double kNormalMean = kShift + kScale * 0.5;
constexpr double kNormalSd = kScale * 0.15;

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace

ModelSpec::ModelSpec(Id id, double tau, double a) : id_(id), tau_(tau), a_(a) {
  const auto [lo, hi] = lifetime_support();
  const auto cuts = breakpoints();
  alpha_ = integrate([this](double x) { return G(x) * lifetime_pdf(x); }, lo, hi, cuts, 1e-12);
}

ModelSpec ModelSpec::m1() { return {Id::kM1, 0.25, 1.0}; }
ModelSpec ModelSpec::m2() { return {Id::kM2, 0.25, 1.0}; }
ModelSpec ModelSpec::m31() { return {Id::kM31, 0.25, 1.0}; }
ModelSpec ModelSpec::m32() { return {Id::kM32, 0.15, 1.0}; }
ModelSpec ModelSpec::m33() { return {Id::kM33, 0.10, 1.0}; }

ModelSpec ModelSpec::misspec(double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::kUsage, "misspecification parameter a must be > 0");
  return {Id::kMisspec, 0.25, a};
}

ModelSpec ModelSpec::from_name(const std::string& name, std::optional<double> a) {
  if (name == "m1") return m1();
  if (name == "m2") return m2();
  if (name == "m31") return m31();
  if (name == "m32") return m32();
  if (name == "m33") return m33();
  if (name == "misspec") {
    if (!a) throw Error(ErrorKind::kUsage, "model 'misspec' needs a value for a");
    return misspec(*a);
  }
  throw Error(ErrorKind::kUsage,
              "unknown model '" + name + "' (expected m1|m2|m31|m32|m33|misspec)");
}

std::string ModelSpec::name() const {
  switch (id_) {
    case Id::kM1: return "m1";
    case Id::kM2: return "m2";
    case Id::kM31: return "m31";
    case Id::kM32: return "m32";
    case Id::kM33: return "m33";
    case Id::kMisspec: return "misspec";
  }
  return "unknown";
}

std::pair<double, double> ModelSpec::lifetime_support() const {
  if (normal_lifetime()) return {kNormalMean - 12.0 * kNormalSd, kNormalMean + 12.0 * kNormalSd};
  return {kShift, kShift + kScale};
}

double ModelSpec::lifetime_pdf(double x) const {
  if (normal_lifetime()) {
    const double z = (x - kNormalMean) / kNormalSd;
    return std::exp(-0.5 * z * z) / (kNormalSd * std::sqrt(2.0 * std::numbers::pi));
  }
  const double z = (x - kShift) / kScale;
  if (z <= 0.0 || z > 1.0) return 0.0;
  return kBetaShape * std::pow(z, kBetaShape - 1.0) / kScale;
}

double ModelSpec::lifetime_cdf(double x) const {
  if (normal_lifetime()) return 1.0 - normal_upper_tail((x - kNormalMean) / kNormalSd);
  const double z = (x - kShift) / kScale;
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return std::pow(z, kBetaShape);
}

double ModelSpec::lifetime_quantile(double p) const {
  if (normal_lifetime())
    return kNormalMean - kNormalSd * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return kShift + kScale * std::pow(p, 1.0 / kBetaShape);
}

double ModelSpec::hazard(double x) const {
  double surv = 0.0;
  if (normal_lifetime()) {
    surv = normal_upper_tail((x - kNormalMean) / kNormalSd);
  } else {
    surv = 1.0 - lifetime_cdf(x);
  }
  if (!(surv > 0.0)) return std::numeric_limits<double>::infinity();
  return lifetime_pdf(x) / surv;
}

double ModelSpec::hazard_second_derivative(double x) const {
  return second_derivative([this](double t) { return hazard(t); }, x, 1e-4);
}

double ModelSpec::truncation_cdf(double u) const {
  if (shifted_uniform()) return std::clamp((u - 0.25) / 0.75, 0.0, 1.0);
  if (id_ == Id::kMisspec) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return 1.0 - std::pow(1.0 - u, a_);
  }
  return std::clamp(u, 0.0, 1.0);
}

double ModelSpec::G(double t) const { return truncation_cdf(t) - truncation_cdf(t - tau_); }

ParametricFamily ModelSpec::default_sp_family() const {
  return shifted_uniform() ? ParametricFamily::uniform() : ParametricFamily::beta_one();
}

std::vector<double> ModelSpec::breakpoints() const {
  const double lo_u = shifted_uniform() ? 0.25 : 0.0;
  return {lo_u, lo_u + tau_, 1.0, 1.0 + tau_, kShift, kShift + kScale};
}

double ModelSpec::draw_lifetime(RandomStream& rng) const {
  if (normal_lifetime()) return kNormalMean + kNormalSd * rng.normal();
  return kShift + kScale * std::pow(rng.uniform(), 1.0 / kBetaShape);
}

double ModelSpec::draw_left(RandomStream& rng) const {
  if (shifted_uniform()) return rng.uniform(0.25, 1.0);
  if (id_ == Id::kMisspec) return 1.0 - std::pow(rng.uniform(), 1.0 / a_);
  return rng.uniform();
}

GeneratedSample generate_sample_counted(const ModelSpec& model, std::size_t n,
                                        RandomStream& rng) {
  if (n == 0) throw Error(ErrorKind::kUsage, "sample size must be >= 1");
  constexpr std::uint64_t kCheckEvery = 10'000'000;
  std::vector<Observation> obs;
  obs.reserve(n);
  std::uint64_t proposals = 0;
  while (obs.size() < n) {
    const double x = model.draw_lifetime(rng);
    const double u = model.draw_left(rng);
    const double v = u + model.tau();
    ++proposals;
    if (u <= x && x <= v) obs.push_back({u, x, v});
    if (proposals % kCheckEvery == 0 &&
        static_cast<double>(obs.size()) < 1e-6 * static_cast<double>(proposals))
      throw Error(ErrorKind::kData, "acceptance probability below 1e-6 for model " + model.name());
  }
  return {validate_sample(obs), proposals};
}

Sample generate_sample(const ModelSpec& model, std::size_t n, RandomStream& rng) {
  return generate_sample_counted(model, n, rng).sample;
}

std::vector<double> true_G_curve(const ModelSpec& model, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  std::transform(grid.begin(), grid.end(), out.begin(), [&](double t) { return model.G(t); });
  return out;
}

std::vector<double> true_G_mc(const ModelSpec& model, std::size_t draws,
                              std::span<const double> grid, RandomStream& rng) {
  std::vector<double> u(draws);
  for (double& x : u) x = model.draw_left(rng);
  std::sort(u.begin(), u.end());
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    // U <= t <= U + tau  <=>  t - tau <= U <= t
    const auto lo = std::lower_bound(u.begin(), u.end(), grid[k] - model.tau());
    const auto hi = std::upper_bound(u.begin(), u.end(), grid[k]);
    out[k] = static_cast<double>(hi - lo) / static_cast<double>(draws);
  }
  return out;
}

double ise(const HazardCurve& curve, const RealFunction& true_lambda,
           std::pair<double, double> range) {
  const auto& g = curve.grid;
  const double lo = std::max(range.first, g.front());
  const double hi = std::min(range.second, g.back());
  if (!(lo < hi)) throw Error(ErrorKind::kUsage, "ISE range does not overlap the curve grid");
  auto interp = [&](double t) {
    const auto it = std::upper_bound(g.begin(), g.end(), t);
    if (it == g.begin()) return curve.values.front();
    if (it == g.end()) return curve.values.back();
    const auto k = static_cast<std::size_t>(it - g.begin());
    const double w = (t - g[k - 1]) / (g[k] - g[k - 1]);
    return curve.values[k - 1] + w * (curve.values[k] - curve.values[k - 1]);
  };
  std::vector<double> xs{lo};
  std::vector<double> sq;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k] > lo && g[k] < hi) xs.push_back(g[k]);
  xs.push_back(hi);
  sq.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const bool on_grid = k > 0 && k + 1 < xs.size();
    const double est = on_grid ? curve.values[static_cast<std::size_t>(
                                     std::lower_bound(g.begin(), g.end(), xs[k]) - g.begin())]
                               : interp(xs[k]);
    const double d = est - true_lambda(xs[k]);
    sq.push_back(d * d);
  }
  return trapezoid(xs, sq);
}

std::pair<double, double> default_ise_range(const ModelSpec& model) {
  return {model.lifetime_quantile(0.05), model.lifetime_quantile(0.90)};
}

const KindSummary* StudyResult::find(EstimatorKind kind) const {
  for (const auto& k : kinds)
    if (k.kind == kind) return &k;
  return nullptr;
}

namespace {

// Per-replicate outcome for one estimator kind.
struct KindReplicate {
  bool ok = false;
  std::vector<double> ise;                    // per h
  std::vector<std::vector<double>> curves;    // per h, on the ISE grid
  std::vector<std::vector<double>> at_probs;  // per h, at the quartile points
};

std::vector<double> replicate_weights(EstimatorKind kind, const ModelSpec& model,
                                      const Sample& sample, const StudyOptions& opt) {
  switch (kind) {
    case EstimatorKind::kNp: {
      const NpmleFit fit = fit_npmle(sample, opt.npmle);
      if (!fit.exists_unique) return {};
      return hazard_weights(fit);
    }
    case EstimatorKind::kSp: {
      const SpmleFit fit = fit_spmle(sample, opt.sp_family.value_or(model.default_sp_family()), model.tau(),
                                     opt.spmle);
      return hazard_weights(fit);
    }
    case EstimatorKind::kNaive: return naive_hazard_weights(sample);
    case EstimatorKind::kOracle: {
      const double n = static_cast<double>(sample.size());
      std::vector<double> w(sample.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = sample[i].x;
        const double surv = 1.0 - model.lifetime_cdf(x);
        w[i] = surv > 0.0 ? model.alpha() / (n * model.G(x) * surv) : 0.0;
      }
      return w;
    }
  }
  return {};
}

StudyResult run_engine(const ModelSpec& model, std::size_t n, const StudyOptions& opt) {
  if (opt.reps == 0) throw Error(ErrorKind::kUsage, "reps must be >= 1");
  if (opt.h_grid.empty()) throw Error(ErrorKind::kUsage, "h grid must be non-empty");
  if (opt.kinds.empty()) throw Error(ErrorKind::kUsage, "no estimator kinds requested");

  StudyResult res;
  res.model = model.name();
  res.misspec_a = model.misspec_a();
  res.n = n;
  res.reps = opt.reps;
  res.seed = opt.seed;
  res.h_grid = opt.h_grid;
  res.ise_range = opt.ise_range.value_or(default_ise_range(model));
  res.ise_grid = linspace(res.ise_range.first, res.ise_range.second, opt.ise_points);
  res.true_curve.resize(res.ise_grid.size());
  for (std::size_t k = 0; k < res.ise_grid.size(); ++k)
    res.true_curve[k] = model.hazard(res.ise_grid[k]);

  std::vector<double> probe_x;
  for (double p : opt.quartile_probs) probe_x.push_back(model.lifetime_quantile(p));

  const std::size_t nk = opt.kinds.size(), nh = opt.h_grid.size(), ng = res.ise_grid.size();
  const RealFunction truth = [&](double x) { return model.hazard(x); };

  std::vector<std::vector<double>> ise_sum(nk, std::vector<double>(nh, 0.0));
  std::vector<std::vector<double>> ise_sq(nk, std::vector<double>(nh, 0.0));
  std::vector<std::vector<std::vector<double>>> curve_sum(
      nk, std::vector<std::vector<double>>(nh, std::vector<double>(ng, 0.0)));
  // probe_values[kind][h][prob] -> values over successful replicates
  std::vector<std::vector<std::vector<std::vector<double>>>> probe_values(
      nk, std::vector<std::vector<std::vector<double>>>(
              nh, std::vector<std::vector<double>>(probe_x.size())));
  std::vector<std::size_t> used(nk, 0), dropped(nk, 0);

  const std::size_t threads = std::max<std::size_t>(1, opt.threads);
  const std::size_t chunk = std::max<std::size_t>(8, 2 * threads);
  for (std::size_t start = 0; start < opt.reps; start += chunk) {
    const std::size_t count = std::min(chunk, opt.reps - start);
    std::vector<std::vector<KindReplicate>> batch(count, std::vector<KindReplicate>(nk));
    parallel_for(count, threads, [&](std::size_t b) {
      RandomStream rng(opt.seed, start + b);
      const Sample sample = generate_sample(model, n, rng);
      const auto x = sample.lifetimes();
      for (std::size_t k = 0; k < nk; ++k) {
        KindReplicate& out = batch[b][k];
        std::vector<double> w;
        try {
          w = replicate_weights(opt.kinds[k], model, sample, opt);
        } catch (const Error&) {
          w.clear();
        }
        if (w.empty()) continue;
        out.ok = true;
        for (double h : opt.h_grid) {
          HazardCurve c;
          c.grid = res.ise_grid;
          c.values = kernel_weighted_sum(x, w, h, opt.kernel, res.ise_grid);
          c.bandwidth = h;
          out.ise.push_back(ise(c, truth, res.ise_range));
          out.curves.push_back(std::move(c.values));
          out.at_probs.push_back(kernel_weighted_sum(x, w, h, opt.kernel, probe_x));
        }
      }
    });
    for (std::size_t b = 0; b < count; ++b) {
      for (std::size_t k = 0; k < nk; ++k) {
        const KindReplicate& r = batch[b][k];
        if (!r.ok) {
          ++dropped[k];
          continue;
        }
        ++used[k];
        for (std::size_t j = 0; j < nh; ++j) {
          ise_sum[k][j] += r.ise[j];
          ise_sq[k][j] += r.ise[j] * r.ise[j];
          for (std::size_t g = 0; g < ng; ++g) curve_sum[k][j][g] += r.curves[j][g];
          for (std::size_t q = 0; q < probe_x.size(); ++q)
            probe_values[k][j][q].push_back(r.at_probs[j][q]);
        }
      }
    }
  }

  for (std::size_t k = 0; k < nk; ++k) {
    KindSummary s;
    s.kind = opt.kinds[k];
    s.used = used[k];
    s.dropped = dropped[k];
    s.mise.assign(nh, std::numeric_limits<double>::quiet_NaN());
    s.mise_se.assign(nh, std::numeric_limits<double>::quiet_NaN());
    std::size_t best = 0;
    if (used[k] > 0) {
      const double m = static_cast<double>(used[k]);
      for (std::size_t j = 0; j < nh; ++j) {
        s.mise[j] = ise_sum[k][j] / m;
        const double var = used[k] > 1 ? (ise_sq[k][j] - m * s.mise[j] * s.mise[j]) / (m - 1.0) : 0.0;
        s.mise_se[j] = std::sqrt(std::max(0.0, var) / m);
        if (s.mise[j] < s.mise[best]) best = j;
      }
      s.h_opt = opt.h_grid[best];
      s.min_mise = s.mise[best];
      s.mean_curve.resize(ng);
      for (std::size_t g = 0; g < ng; ++g) s.mean_curve[g] = curve_sum[k][best][g] / m;
      for (std::size_t q = 0; q < probe_x.size(); ++q) {
        const auto& vals = probe_values[k][best][q];
        QuartileCell cell;
        cell.kind = s.kind;
        cell.prob = opt.quartile_probs[q];
        cell.x = probe_x[q];
        cell.truth = model.hazard(probe_x[q]);
        cell.h = s.h_opt;
        cell.used = vals.size();
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        cell.bias = mean - cell.truth;
        cell.variance = vals.size() > 1 ? ss / static_cast<double>(vals.size() - 1) : 0.0;
        res.quartiles.push_back(cell);
      }
    } else {
      s.h_opt = std::numeric_limits<double>::quiet_NaN();
      s.min_mise = std::numeric_limits<double>::quiet_NaN();
    }
    res.kinds.push_back(std::move(s));
  }

  const KindSummary* np = res.find(EstimatorKind::kNp);
  const KindSummary* sp = res.find(EstimatorKind::kSp);
  if (np && sp && np->used > 0 && sp->used > 0) {
    res.ratio_sp_np.resize(nh);
    for (std::size_t j = 0; j < nh; ++j) res.ratio_sp_np[j] = sp->mise[j] / np->mise[j];
  }
  return res;
}

}  // namespace

StudyResult run_mise_study(const ModelSpec& model, std::size_t n, const StudyOptions& options) {
  return run_engine(model, n, options);
}

StudyResult bias_variance_at_quartiles(const ModelSpec& model, std::size_t n, double h,
                                       StudyOptions options) {
  options.h_grid = {h};
  return run_engine(model, n, options);
}

std::vector<StudyResult> misspecification_study(std::span<const double> a_values, std::size_t n,
                                                const StudyOptions& options) {
  std::vector<StudyResult> out;
  for (double a : a_values) {
    StudyOptions opt = options;
    opt.sp_family = ParametricFamily::beta_one();
    out.push_back(run_engine(ModelSpec::misspec(a), n, opt));
  }
  return out;
}

}  // namespace dthazard
