#include "finsq/app/schema.hpp"

#include <cmath>
#include <set>

#include "schemas_embedded.hpp"

namespace finsq::app {

namespace {

std::string pointer_escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

bool is_type(const Json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && std::floor(d) == d;
  }
  return false;
}

std::string type_name(const Json& v) {
  if (v.is_object()) return "object";
  if (v.is_array()) return "array";
  if (v.is_string()) return "string";
  if (v.is_boolean()) return "boolean";
  if (v.is_null()) return "null";
  if (v.is_number_integer()) return "integer";
  return "number";
}

}  // namespace

Schema::Schema(Json root) : root_(std::move(root)) {}

Schema Schema::parse(const std::string& text) { return Schema(Json::parse(text)); }

std::vector<SchemaIssue> Schema::validate(const Json& instance) const {
  std::vector<SchemaIssue> out;
  check(root_, instance, "", out);
  return out;
}

const Json& Schema::resolve(const Json& schema) const {
  if (!schema.is_object() || !schema.contains("$ref")) return schema;
  const std::string ref = schema["$ref"].get<std::string>();
  if (ref.rfind("#/", 0) != 0) throw std::invalid_argument("schema: only local $ref is supported: " + ref);
  return resolve(root_.at(Json::json_pointer(ref.substr(1))));
}

void Schema::check(const Json& raw, const Json& value, const std::string& path, std::vector<SchemaIssue>& out) const {
  const Json& schema = resolve(raw);
  if (!schema.is_object()) return;

  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    std::string expected;
    if (t.is_string()) {
      ok = is_type(value, t.get<std::string>());
      expected = t.get<std::string>();
    } else {
      for (const auto& alt : t) {
        ok = ok || is_type(value, alt.get<std::string>());
        expected += (expected.empty() ? "" : " or ") + alt.get<std::string>();
      }
    }
    if (!ok) {
      out.push_back({path, "expected " + expected + ", got " + type_name(value)});
      return;
    }
  }
  if (schema.contains("const") && value != schema["const"]) {
    out.push_back({path, "must equal " + schema["const"].dump()});
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    if (!found) out.push_back({path, "value " + value.dump() + " is not one of " + schema["enum"].dump()});
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (schema.contains("minimum") && v < schema["minimum"].get<double>()) {
      out.push_back({path, "must be >= " + schema["minimum"].dump()});
    }
    if (schema.contains("maximum") && v > schema["maximum"].get<double>()) {
      out.push_back({path, "must be <= " + schema["maximum"].dump()});
    }
    if (schema.contains("exclusiveMinimum") && !(v > schema["exclusiveMinimum"].get<double>())) {
      out.push_back({path, "must be > " + schema["exclusiveMinimum"].dump()});
    }
    if (schema.contains("exclusiveMaximum") && !(v < schema["exclusiveMaximum"].get<double>())) {
      out.push_back({path, "must be < " + schema["exclusiveMaximum"].dump()});
    }
  }
  if (value.is_string() && schema.contains("minLength") &&
      value.get<std::string>().size() < schema["minLength"].get<std::size_t>()) {
    out.push_back({path, "string is too short"});
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      out.push_back({path, "needs at least " + schema["minItems"].dump() + " items"});
    }
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>()) {
      out.push_back({path, "allows at most " + schema["maxItems"].dump() + " items"});
    }
    if (schema.value("uniqueItems", false)) {
      std::set<std::string> seen;
      for (const auto& item : value) {
        if (!seen.insert(item.dump()).second) out.push_back({path, "duplicate item " + item.dump()});
      }
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i) check(schema["items"], value[i], path + "/" + std::to_string(i), out);
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          out.push_back({path, "missing required property " + key.dump()});
        }
      }
    }
    const Json empty = Json::object();
    const Json& props = schema.contains("properties") ? schema["properties"] : empty;
    for (const auto& [key, item] : value.items()) {
      const std::string child = path + "/" + pointer_escape(key);
      if (props.contains(key)) {
        check(props[key], item, child, out);
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false) {
        out.push_back({child, "unknown property"});
      }
    }
  }
  for (const char* kw : {"oneOf", "anyOf"}) {
    if (!schema.contains(kw)) continue;
    std::size_t matches = 0;
    std::vector<SchemaIssue> first_errors;
    for (const auto& alt : schema[kw]) {
      std::vector<SchemaIssue> errs;
      check(alt, value, path, errs);
      if (errs.empty()) {
        ++matches;
      } else if (first_errors.empty() || errs.size() < first_errors.size()) {
        first_errors = errs;
      }
    }
    const bool one = std::string(kw) == "oneOf";
    if (matches == 0) {
      if (first_errors.size() == 1) {
        out.push_back(first_errors.front());
      } else {
        out.push_back({path, "does not match any allowed form"});
      }
    } else if (one && matches > 1) {
      out.push_back({path, "matches more than one allowed form"});
    }
  }
}

const Schema& config_schema() {
  static const Schema s = Schema::parse(embedded::config_schema);
  return s;
}

const Schema& metric_schema() {
  static const Schema s = Schema::parse(embedded::metric_schema);
  return s;
}

const Schema& report_schema() {
  static const Schema s = Schema::parse(embedded::report_schema);
  return s;
}

}  // namespace finsq::app
