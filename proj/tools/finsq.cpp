#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "finsq/app/suites.hpp"

using finsq::app::ConfigError;
using finsq::app::Json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

Eigen::VectorXd parse_csv(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--" + what + ": '" + item + "' is not a number");
    }
  }
  if (vals.empty()) throw ConfigError("--" + what + ": empty vector");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return a;
}

void write_output(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write '" + out + "'");
  f << text;
}

int run_check(const std::string& config_file, std::optional<std::size_t> samples, std::optional<std::uint64_t> seed,
              const std::string& out) {
  std::ifstream in(config_file);
  if (!in) throw ConfigError("cannot open config file '" + config_file + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid config: not valid JSON: ") + e.what());
  }
  if (doc.is_object()) {
    if (samples) doc["samples"] = *samples;
    if (seed) doc["seed"] = *seed;
  }
  const auto config = finsq::app::parse_config(doc, std::filesystem::path(config_file).parent_path());
  const auto report = finsq::app::run_suites(config);
  write_output(report.to_json(), out);
  for (const auto& s : report.suites) {
    std::cerr << (s.pass() ? "PASS " : "FAIL ") << s.name << "  max " << s.max_residual() << "  used "
              << s.samples_used << "  skipped " << s.samples_skipped;
    if (!s.reason.empty()) std::cerr << "  (" << s.reason << ")";
    std::cerr << "\n";
  }
  return report.pass() ? kPass : kFail;
}

int run_construct(const finsq::app::ConstructSpec& spec, const std::string& out) {
  finsq::app::make_constructed(spec);
  write_output(finsq::app::metric_document(spec), out);
  return kPass;
}

int run_eval(const std::string& metric_name, const std::string& params, const std::string& xs, const std::string& ys,
             const std::string& us, const std::string& quantity) {
  Json p = Json::object();
  if (!params.empty()) {
    try {
      p = Json::parse(params);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("--params: not valid JSON: ") + e.what());
    }
  }
  const auto entry = finsq::app::resolve_metric(metric_name, p);
  const auto& f = *entry.metric;
  const Eigen::VectorXd x = parse_csv(xs, "x");
  const Eigen::VectorXd y = parse_csv(ys, "y");
  if (x.size() != f.dim() || y.size() != f.dim()) {
    throw ConfigError("--x/--y: metric '" + entry.name + "' has dimension " + std::to_string(f.dim()));
  }
  Json j;
  j["metric"] = entry.name;
  j["x"] = to_json(x);
  j["y"] = to_json(y);
  j["quantity"] = quantity;
  if (quantity == "F") {
    j["value"] = finsq::f_value(f, x, y);
  } else if (quantity == "g") {
    j["value"] = to_json(finsq::fundamental_tensor(f, x, y).g);
  } else if (quantity == "spray") {
    j["value"] = to_json(finsq::spray_generic(f, x, y));
  } else if (quantity == "ricci") {
    j["value"] = finsq::ricci(f, x, y);
  } else {
    if (us.empty()) throw ConfigError("--u: required for --quantity flag");
    const Eigen::VectorXd u = parse_csv(us, "u");
    if (u.size() != f.dim()) throw ConfigError("--u: wrong dimension");
    j["u"] = to_json(u);
    j["value"] = finsq::flag_curvature(f, x, y, u);
  }
  write_output(j, "");
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Einstein square metrics: curvature checks and constructions"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "run check suites from a config file");
  std::string config_file;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::string out;
  check->add_option("--config", config_file, "config JSON")->required();
  check->add_option("--samples", samples, "override the sample count")->check(CLI::PositiveNumber);
  check->add_option("--seed", seed, "override the seed");
  check->add_option("--out", out, "report file (default: stdout)");

  auto* construct = app.add_subcommand("construct", "write an Einstein square metric document");
  finsq::app::ConstructSpec spec;
  std::string construct_out;
  construct->add_option("--dim", spec.dim, "dimension n >= 3")->required();
  construct->add_option("--c", spec.c, "slope of h = ct + d")->required();
  construct->add_option("--d", spec.d, "offset of h = ct + d")->required();
  construct->add_option("--factor", spec.factor, "Einstein factor")
      ->check(CLI::IsMember({"sphere", "flat"}))
      ->default_val("sphere");
  construct->add_option("--out", construct_out, "metric file (default: stdout)");

  auto* eval = app.add_subcommand("eval", "evaluate a quantity at one (x, y)");
  std::string metric_name, params, xs, ys, us, quantity = "F";
  eval->add_option("--metric", metric_name, "built-in name or metric document")->required();
  eval->add_option("--params", params, "built-in parameters as JSON");
  eval->add_option("--x", xs, "point, comma separated")->required();
  eval->add_option("--y", ys, "direction, comma separated")->required();
  eval->add_option("--u", us, "second flag vector, for --quantity flag");
  eval->add_option("--quantity", quantity, "F, g, spray, ricci or flag")
      ->check(CLI::IsMember({"F", "g", "spray", "ricci", "flag"}));

  auto* list = app.add_subcommand("list-metrics", "list built-in metrics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*check) return run_check(config_file, samples, seed, out);
    if (*construct) return run_construct(spec, construct_out);
    if (*eval) return run_eval(metric_name, params, xs, ys, us, quantity);
    if (*list) {
      for (const auto& b : finsq::app::list_builtins()) std::cout << b.name << "\t" << b.description << "\n";
      return kPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const finsq::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kConfigError;
}
