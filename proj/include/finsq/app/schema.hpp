#pragma once

// A small JSON-schema validator covering the keywords used by the shipped
// schemas: type, enum, const, properties, required, additionalProperties,
// items, numeric and size bounds, uniqueItems, oneOf, anyOf and local $ref.

#include <string>
#include <vector>

#include "json.hpp"

namespace finsq::app {

using Json = nlohmann::ordered_json;

struct SchemaIssue {
  std::string path;  // JSON pointer into the instance; empty for the root
  std::string message;
  std::string to_string() const { return (path.empty() ? "/" : path) + ": " + message; }
};

class Schema {
 public:
  explicit Schema(Json root);
  static Schema parse(const std::string& text);

  std::vector<SchemaIssue> validate(const Json& instance) const;

 private:
  void check(const Json& schema, const Json& value, const std::string& path, std::vector<SchemaIssue>& out) const;
  const Json& resolve(const Json& schema) const;
  Json root_;
};

/// Schemas shipped in schemas/, embedded at build time.
const Schema& config_schema();
const Schema& metric_schema();
const Schema& report_schema();

}  // namespace finsq::app
