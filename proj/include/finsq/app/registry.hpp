#pragma once

// Metrics addressable by name: built-ins, inline (alpha, beta, phi)
// definitions, constructed Einstein square metrics and metric documents.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "finsq/app/schema.hpp"
#include "finsq/construct.hpp"

namespace finsq::app {

/// Configuration problem; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConstructSpec {
  int dim = 4;
  double c = 1.0;
  double d = 0.5;
  std::string factor = "sphere";
};

struct MetricEntry {
  std::string name;
  std::string description;
  FinslerPtr metric;
  std::optional<SquarePair> pair;        // F = (alpha + beta)^2 / alpha with this pair
  bool nontrivial_square = false;        // pair with beta not identically zero
  std::optional<DeformedPairBar> bar;    // bar pair of a construction
  std::shared_ptr<const WarpedMetric> warped;
  std::optional<double> flag_curvature;  // known constant flag curvature
  std::optional<double> einstein_scale;  // known Einstein scale c in Ric = (n-1) c F^2
  Json source;                           // self-describing document of this metric
};

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> list_builtins();

MetricEntry make_builtin(const std::string& name, const Json& params = Json::object());
MetricEntry make_inline(const Json& definition);
MetricEntry make_constructed(const ConstructSpec& spec);

/// Validates against the metric schema, then builds the entry.
MetricEntry load_metric_document(const Json& doc);
Json metric_document(const ConstructSpec& spec);

/// A built-in name, or a path to a metric document (relative paths resolve against base_dir).
MetricEntry resolve_metric(const std::string& name_or_file, const Json& params = Json::object(),
                           const std::filesystem::path& base_dir = {});

ConstructSpec construct_spec_from_json(const Json& j);

}  // namespace finsq::app
