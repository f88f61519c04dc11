#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finsq/app/registry.hpp"

namespace finsq::app {

const std::vector<std::string>& suite_names();
/// Default tolerance of each suite's primary residual.
const std::map<std::string, double>& default_tolerances();

struct RunConfig {
  std::shared_ptr<const MetricEntry> metric;
  std::vector<std::string> suites;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // only explicit overrides
  double max_x = 0.8;
  double b_cap = 0.9;
  std::optional<double> flag_curvature;
  std::optional<double> einstein_scale;
  DerivativeBackend backend = DerivativeBackend::jet;

  double tolerance(const std::string& suite) const;
  /// Normalized configuration with defaults filled, as echoed in reports.
  Json echo() const;
};

/// Validates against the config schema and resolves the metric; throws ConfigError with a path-qualified message.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {});
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& file);

}  // namespace finsq::app
