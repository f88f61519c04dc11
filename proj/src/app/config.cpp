#include "finsq/app/config.hpp"

#include <fstream>
#include <sstream>

namespace finsq::app {

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"einstein", "cfc",          "deformation", "pde",
                                              "douglas",  "closed",       "spray-deform", "warped"};
  return names;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table{
      {"einstein", 1e-6}, {"cfc", 1e-6},    {"deformation", 1e-10}, {"pde", 1e-10},
      {"douglas", 1e-6},  {"closed", 1e-10}, {"spray-deform", 1e-7}, {"warped", 1e-7},
  };
  return table;
}

double RunConfig::tolerance(const std::string& suite) const {
  const auto it = tolerances.find(suite);
  return it != tolerances.end() ? it->second : default_tolerances().at(suite);
}

Json RunConfig::echo() const {
  Json j;
  j["metric"] = metric->source.is_null() ? Json(metric->name) : metric->source;
  j["suite"] = suites;
  j["samples"] = samples;
  j["seed"] = seed;
  Json tol = Json::object();
  for (const auto& s : suites) tol[s] = tolerance(s);
  j["tolerances"] = tol;
  j["domain"] = {{"max_x", max_x}, {"b_cap", b_cap}};
  j["flag_curvature"] = flag_curvature ? Json(*flag_curvature) : Json();
  j["einstein_scale"] = einstein_scale ? Json(*einstein_scale) : Json();
  j["backend"] = backend == DerivativeBackend::jet ? "jet" : "finite-difference";
  return j;
}

RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  const auto issues = config_schema().validate(doc);
  if (!issues.empty()) {
    std::string msg = "invalid config: " + issues.front().to_string();
    if (issues.size() > 1) msg += " (and " + std::to_string(issues.size() - 1) + " more)";
    throw ConfigError(msg);
  }
  const bool has_metric = doc.contains("metric");
  if (has_metric == doc.contains("construct")) {
    throw ConfigError("invalid config: /: exactly one of 'metric' and 'construct' is required");
  }
  if (doc.contains("params") && !(has_metric && doc["metric"].is_string())) {
    throw ConfigError("invalid config: /params: only applies to a metric given by name");
  }

  MetricEntry entry;
  if (!has_metric) {
    entry = make_constructed(construct_spec_from_json(doc["construct"]));
  } else if (doc["metric"].is_string()) {
    entry = resolve_metric(doc["metric"].get<std::string>(), doc.value("params", Json::object()), base_dir);
  } else {
    entry = make_inline(doc["metric"]);
  }

  RunConfig cfg;
  cfg.metric = std::make_shared<const MetricEntry>(std::move(entry));
  for (const auto& s : doc["suite"]) cfg.suites.push_back(s.get<std::string>());
  cfg.samples = doc.value("samples", std::size_t{100});
  cfg.seed = doc.value("seed", std::uint64_t{0});
  if (doc.contains("tolerances")) {
    for (const auto& [k, v] : doc["tolerances"].items()) cfg.tolerances[k] = v.get<double>();
  }
  if (doc.contains("domain")) {
    cfg.max_x = doc["domain"].value("max_x", cfg.max_x);
    cfg.b_cap = doc["domain"].value("b_cap", cfg.b_cap);
  }
  cfg.flag_curvature = doc.contains("flag_curvature") ? std::optional<double>(doc["flag_curvature"].get<double>())
                                                      : cfg.metric->flag_curvature;
  cfg.einstein_scale = doc.contains("einstein_scale") ? std::optional<double>(doc["einstein_scale"].get<double>())
                                                      : cfg.metric->einstein_scale;
  if (doc.value("backend", std::string("jet")) == "finite-difference") cfg.backend = DerivativeBackend::finite_difference;

  const MetricEntry& m = *cfg.metric;
  const bool is_ab = m.pair || std::dynamic_pointer_cast<const GeneralABMetric>(m.metric);
  for (std::size_t i = 0; i < cfg.suites.size(); ++i) {
    const std::string& s = cfg.suites[i];
    const std::string where = "invalid config: /suite/" + std::to_string(i) + ": ";
    if (s == "cfc" && !cfg.flag_curvature) {
      throw ConfigError(where + "metric '" + m.name + "' has no known flag curvature; set 'flag_curvature'");
    }
    if ((s == "deformation" || s == "spray-deform") && !m.pair) {
      throw ConfigError(where + "'" + s + "' needs a square metric, '" + m.name + "' is not one");
    }
    if (s == "closed" && !is_ab) throw ConfigError(where + "'closed' needs an (alpha, beta)-metric");
    if (s == "warped" && !m.warped) throw ConfigError(where + "'warped' needs a constructed warped-product metric");
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid config: not valid JSON: ") + e.what());
  }
  return parse_config(doc, base_dir);
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), file.parent_path());
}

}  // namespace finsq::app
