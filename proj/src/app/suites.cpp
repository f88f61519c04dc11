#include "finsq/app/suites.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include <Eigen/Core>

#include "finsq/parallel.hpp"

#ifndef FINSQ_VERSION
#define FINSQ_VERSION "0.0.0"
#endif

namespace finsq::app {

namespace {

struct PointResult {
  std::vector<double> values;
  double extra = 0.0;
};

// Evaluates fn on every sample; metric failures become skips.
template <class F>
std::vector<std::optional<PointResult>> per_sample(const SampleSet& set, F&& fn) {
  return parallel_map<std::optional<PointResult>>(set.samples.size(), [&](std::size_t i) -> std::optional<PointResult> {
    try {
      return fn(set.samples[i]);
    } catch (const DomainError&) {
      return std::nullopt;
    } catch (const SingularError&) {
      return std::nullopt;
    }
  });
}

Certificate from_points(const std::string& name, const std::vector<std::optional<PointResult>>& raw,
                        const std::vector<std::string>& checks, const std::vector<double>& tols,
                        std::size_t pre_skipped) {
  Certificate cert;
  cert.name = name;
  for (std::size_t c = 0; c < checks.size(); ++c) cert.checks.push_back({checks[c], {}, tols[c]});
  for (const auto& r : raw) {
    if (!r) continue;
    ++cert.samples_used;
    for (std::size_t c = 0; c < checks.size(); ++c) cert.checks[c].stats.add(r->values[c]);
  }
  cert.samples_skipped = pre_skipped + (raw.size() - cert.samples_used);
  if (cert.samples_used == 0) cert.reason = "no usable samples";
  return cert;
}

void absorb(Certificate& into, const Certificate& part, const std::string& prefix) {
  for (auto c : part.checks) {
    c.name = prefix + c.name;
    into.checks.push_back(std::move(c));
  }
  for (const auto& f : part.fitted) into.fitted.push_back(f);
  if (!part.reason.empty() && into.reason.empty()) into.reason = prefix + part.reason;
}

CurvatureOptions curvature_options(const RunConfig& config) {
  CurvatureOptions o;
  o.backend = config.backend;
  return o;
}

Certificate einstein_suite(const RunConfig& config, const SampleSet& samples, double tol) {
  const MetricEntry& m = *config.metric;
  const FinslerMetric& f = *m.metric;
  const int n = f.dim();
  const auto opts = curvature_options(config);
  // Ric / ((n - 1) F^2) per sample
  const auto raw = per_sample(samples, [&](const Sample& s) {
    const CurvatureData cd = curvature(f, s.x, s.y, opts);
    return PointResult{{}, cd.ricci / ((n - 1) * cd.f2)};
  });
  double scale = 0.0;
  if (config.einstein_scale) {
    scale = *config.einstein_scale;
  } else {
    std::size_t k = 0;
    for (const auto& r : raw)
      if (r) {
        scale += r->extra;
        ++k;
      }
    if (k > 0) scale /= static_cast<double>(k);
  }
  std::vector<std::optional<PointResult>> resid(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw[i]) resid[i] = PointResult{{std::abs(raw[i]->extra - scale) * (n - 1)}, 0.0};
  Certificate cert = from_points("einstein", resid, {"ricci"}, {tol}, samples.skipped);
  cert.fitted.emplace_back(config.einstein_scale ? "einstein_scale" : "einstein_scale_fitted", scale);

  if (m.pair && m.nontrivial_square && config.einstein_scale && *config.einstein_scale == 0.0) {
    absorb(cert, check_theorem_1_1(*m.pair, samples, tol), "square/");
    absorb(cert, check_theorem_2_1(*m.pair, samples, tol), "tau/");
  }
  return cert;
}

Certificate cfc_suite(const RunConfig& config, const SampleSet& samples, double tol) {
  const FinslerMetric& f = *config.metric->metric;
  const double k = *config.flag_curvature;
  const auto opts = curvature_options(config);
  const auto raw = per_sample(samples, [&](const Sample& s) {
    const CurvatureData cd = curvature(f, s.x, s.y, opts);
    const double flag = flag_curvature(cd, s.y, s.u);
    return PointResult{{cfc_residual(cd, s.y, k), std::abs(flag - k) / (1.0 + std::abs(k))}, 0.0};
  });
  Certificate cert = from_points("cfc", raw, {"riemann", "flag"}, {tol, tol}, samples.skipped);
  cert.fitted.emplace_back("flag_curvature", k);
  return cert;
}

Certificate warped_suite(const RunConfig& config, const SampleSet& samples, double tol) {
  const MetricEntry& m = *config.metric;
  const auto raw = per_sample(samples, [&](const Sample& s) {
    if (!m.warped->in_domain(s.x)) throw DomainError("outside the warped chart");
    const Eigen::VectorXd y = s.y.normalized();
    return PointResult{{warped_ricci_residual(*m.warped, s.x, y)}, 0.0};
  });
  Certificate cert = from_points("warped", raw, {"trace-formula"}, {tol}, samples.skipped);
  absorb(cert, check_bar_conditions(*m.bar, samples, 10.0 * tol), "bar/");
  return cert;
}

SquarePair ab_pair(const MetricEntry& m) {
  if (m.pair) return *m.pair;
  const auto ab = std::dynamic_pointer_cast<const GeneralABMetric>(m.metric);
  return {ab->alpha(), ab->beta()};
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(); }

}  // namespace

Certificate run_suite(const std::string& suite, const RunConfig& config, const SampleSet& samples) {
  const double tol = config.tolerance(suite);
  const MetricEntry& m = *config.metric;
  Certificate cert;
  if (suite == "einstein") {
    cert = einstein_suite(config, samples, tol);
  } else if (suite == "cfc") {
    cert = cfc_suite(config, samples, tol);
  } else if (suite == "deformation") {
    cert = check_deformations(*m.pair, samples, tol, 10.0 * tol);
  } else if (suite == "pde") {
    cert = check_pde(tol);
  } else if (suite == "douglas") {
    cert = check_douglas(*m.metric, samples, tol);
  } else if (suite == "closed") {
    cert = check_closed(ab_pair(m), samples, tol);
  } else if (suite == "spray-deform") {
    cert = check_spray_deformation(*m.pair, samples, tol);
  } else if (suite == "warped") {
    cert = warped_suite(config, samples, tol);
  } else {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  cert.name = suite;
  return cert;
}

CheckReport run_suites(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  SamplingOptions opts;
  opts.samples = config.samples;
  opts.seed = config.seed;
  opts.max_x = config.max_x;
  opts.b_cap = config.b_cap;
  const SampleSet samples = draw_samples(domain_of(*config.metric->metric, config.b_cap), opts);

  CheckReport report;
  report.config = config.echo();
  report.metric = config.metric->name;
  for (const auto& s : config.suites) report.suites.push_back(run_suite(s, config, samples));
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

bool CheckReport::pass() const {
  for (const auto& s : suites)
    if (!s.pass()) return false;
  return !suites.empty();
}

Json certificate_json(const Certificate& cert) {
  Json j;
  j["name"] = cert.name;
  j["pass"] = cert.pass();
  j["samples_used"] = cert.samples_used;
  j["samples_skipped"] = cert.samples_skipped;
  j["max_residual"] = number(cert.max_residual());
  j["mean_residual"] = number(cert.mean_residual());
  Json fitted = Json::object();
  for (const auto& [k, v] : cert.fitted) fitted[k] = number(v);
  j["fitted_constants"] = fitted;
  Json checks = Json::array();
  for (const auto& c : cert.checks) {
    checks.push_back({{"name", c.name},
                      {"max", number(c.stats.max)},
                      {"mean", number(c.stats.mean())},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass()}});
  }
  j["checks"] = checks;
  if (!cert.reason.empty()) j["reason"] = cert.reason;
  return j;
}

Json CheckReport::to_json(bool include_timing) const {
  Json j;
  j["report_version"] = 1;
  j["versions"] = {{"finsq", finsq_version()}, {"eigen", eigen_version()}};
  j["config"] = config;
  j["metric"] = metric;
  Json arr = Json::array();
  for (const auto& s : suites) arr.push_back(certificate_json(s));
  j["suites"] = arr;
  j["pass"] = pass();
  if (include_timing) j["timing"] = {{"wall_time", wall_time}};
  return j;
}

std::string finsq_version() { return FINSQ_VERSION; }

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace finsq::app
