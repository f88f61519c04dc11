#include "finsq/app/registry.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace finsq::app {

namespace {

// Funk metric of the unit ball as a Randers metric: constant flag curvature -1/4.
class FunkAlpha final : public RiemannMetricImpl<FunkAlpha> {
 public:
  explicit FunkAlpha(int n) : n_(n) {}
  int dim() const override { return n_; }
  std::string name() const override { return "funk-alpha"; }
  bool in_domain(const Eigen::VectorXd& x) const override { return x.squaredNorm() < 1.0; }
  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    const S q = 1.0 - dot<S>(x, x);
    const S inv = S(1.0) / (q * q);
    MatX<S> a(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a(i, j) = (x(i) * x(j) + (i == j ? q : S(0.0))) * inv;
    return a;
  }

 private:
  int n_;
};

class FunkBeta final : public OneFormImpl<FunkBeta> {
 public:
  using OneFormImpl::OneFormImpl;
  std::string name() const override { return "funk-beta"; }
  template <class S>
  VecX<S> eval(const VecX<S>& x) const {
    const S inv = S(1.0) / (1.0 - dot<S>(x, x));
    VecX<S> b(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) b(i) = x(i) * inv;
    return b;
  }
};

struct Builtin {
  const char* name;
  const char* description;
  std::set<std::string> params;
};

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> table{
      {"euclidean", "flat Riemannian metric |y| (params: dim)", {"dim"}},
      {"sphere", "round sphere of curvature kappa, stereographic chart (params: dim, kappa)", {"dim", "kappa"}},
      {"conformal-exp", "Riemannian e^{2 x_1} |y|^2 (params: dim)", {"dim"}},
      {"berwald", "Berwald's metric on the unit ball, zero flag curvature (params: dim)", {"dim"}},
      {"berwald-bar", "Berwald's metric from the flat pair (|y|, <x, y>) (params: dim)", {"dim"}},
      {"berwald-family", "square metric of (|y|, <cx + a, y>), zero flag curvature (params: dim, c, a)",
       {"dim", "c", "a"}},
      {"funk", "Funk metric on the unit ball, flag curvature -1/4 (params: dim)", {"dim"}},
      {"randers-twisted", "Randers metric with a non-closed 1-form, not of Douglas type (params: dim)", {"dim"}},
      {"warped", "Einstein square metric from the warped product over a round sphere (params: dim, c, a=[d])",
       {"dim", "c", "a"}},
  };
  return table;
}

int param_dim(const Json& params, int fallback, int min_dim = 2) {
  const int n = params.value("dim", fallback);
  if (n < min_dim) throw ConfigError("/params/dim: must be at least " + std::to_string(min_dim));
  return n;
}

Eigen::VectorXd to_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(path + "/" + std::to_string(i) + ": expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd to_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = to_vector(j[static_cast<std::size_t>(r)], path + "/" + std::to_string(r));
    if (row.size() != cols) throw ConfigError(path + "/" + std::to_string(r) + ": ragged matrix row");
    m.row(r) = row.transpose();
  }
  return m;
}

OneFormPtr zero_form(const MetricPtr& alpha) {
  const int n = alpha->dim();
  return std::make_shared<LinearOneForm>(alpha, Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n));
}

MetricEntry square_entry(std::string name, const SquarePair& pair, ABMetricPtr f, bool nontrivial) {
  MetricEntry e;
  e.name = std::move(name);
  e.metric = std::move(f);
  e.pair = pair;
  e.nontrivial_square = nontrivial;
  return e;
}

MetricEntry riemannian_entry(std::string name, const MetricPtr& alpha) {
  const SquarePair pair{alpha, zero_form(alpha)};
  return square_entry(std::move(name), pair, square_metric(pair, alpha->name()), false);
}

}  // namespace

std::vector<BuiltinInfo> list_builtins() {
  std::vector<BuiltinInfo> out;
  for (const auto& b : builtins()) out.push_back({b.name, b.description});
  return out;
}

MetricEntry make_builtin(const std::string& name, const Json& params) {
  const Builtin* found = nullptr;
  for (const auto& b : builtins())
    if (name == b.name) found = &b;
  if (!found) {
    std::string known;
    for (const auto& b : builtins()) known += std::string(known.empty() ? "" : ", ") + b.name;
    throw ConfigError("/metric: unknown metric '" + name + "' (built-ins: " + known + ")");
  }
  for (const auto& [key, value] : params.items()) {
    if (!found->params.count(key)) throw ConfigError("/params/" + key + ": not used by metric '" + name + "'");
  }

  MetricEntry e;
  try {
    if (name == "euclidean") {
      e = riemannian_entry(name, std::make_shared<EuclideanMetric>(param_dim(params, 3, 1)));
      e.flag_curvature = 0.0;
      e.einstein_scale = 0.0;
    } else if (name == "sphere") {
      const double kappa = params.value("kappa", 1.0);
      e = riemannian_entry(name, std::make_shared<SphereMetric>(param_dim(params, 3), kappa));
      e.flag_curvature = kappa;
      e.einstein_scale = kappa;
    } else if (name == "conformal-exp") {
      const int n = param_dim(params, 3);
      e = riemannian_entry(name, std::make_shared<ConformalExpMetric>(n));
      if (n == 2) {
        e.flag_curvature = 0.0;
        e.einstein_scale = 0.0;
      }
    } else if (name == "berwald") {
      e = square_entry(name, berwald_pair(param_dim(params, 3)), berwald_metric(param_dim(params, 3)), true);
      e.flag_curvature = 0.0;
      e.einstein_scale = 0.0;
    } else if (name == "berwald-bar" || name == "berwald-family") {
      const int n = param_dim(params, 3);
      BerwaldFamilySpec spec;
      spec.c = name == "berwald-bar" ? 1.0 : params.value("c", 2.0);
      if (params.contains("a")) spec.a = to_vector(params["a"], "/params/a");
      const auto bar = berwald_family_pair(n, spec);
      e = square_entry(name, bar_to_original(bar), bar_to_square(bar, name), spec.c != 0.0 || spec.a.norm() > 0.0);
      e.bar = bar;
      e.flag_curvature = 0.0;
      e.einstein_scale = 0.0;
    } else if (name == "funk") {
      auto a = std::make_shared<FunkAlpha>(param_dim(params, 3));
      e.name = name;
      e.metric = std::make_shared<GeneralABMetric>(a, std::make_shared<FunkBeta>(a), phi_library("randers"), name);
      e.flag_curvature = -0.25;
      e.einstein_scale = -0.25;
    } else if (name == "randers-twisted") {
      const int n = param_dim(params, 3);
      auto a = std::make_shared<EuclideanMetric>(n);
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      m(0, 1) = 0.5;
      m(1, 0) = -0.5;
      Eigen::VectorXd off = Eigen::VectorXd::Zero(n);
      off(n - 1) = 0.1;
      e.name = name;
      e.metric = std::make_shared<GeneralABMetric>(a, std::make_shared<LinearOneForm>(a, m, off),
                                                   phi_library("randers"), name);
    } else if (name == "warped") {
      ConstructSpec spec;
      spec.dim = param_dim(params, 4, 3);
      spec.c = params.value("c", 1.0);
      if (params.contains("a")) {
        const auto a = to_vector(params["a"], "/params/a");
        if (a.size() != 1) throw ConfigError("/params/a: warped takes a single offset d");
        spec.d = a(0);
      }
      e = make_constructed(spec);
      e.name = name;
      e.source = Json();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError("/params: cannot build metric '" + name + "': " + ex.what());
  }
  e.description = found->description;
  e.source = Json{{"builtin", name}, {"params", params}};
  return e;
}

MetricEntry make_inline(const Json& def) {
  const std::string base = "/metric";
  const Json& aj = def.at("alpha");
  const std::string type = aj.at("type").get<std::string>();
  MetricPtr alpha;
  auto need_dim = [&]() {
    if (!aj.contains("dim")) throw ConfigError(base + "/alpha/dim: required for type '" + type + "'");
    return aj["dim"].get<int>();
  };
  try {
    if (type == "euclidean") {
      alpha = std::make_shared<EuclideanMetric>(need_dim());
    } else if (type == "sphere") {
      alpha = std::make_shared<SphereMetric>(need_dim(), aj.value("kappa", 1.0));
    } else if (type == "conformal-exp") {
      alpha = std::make_shared<ConformalExpMetric>(need_dim());
    } else if (type == "berwald-alpha") {
      alpha = std::make_shared<BerwaldAlphaMetric>(need_dim());
    } else {
      if (!aj.contains("matrix")) throw ConfigError(base + "/alpha/matrix: required for type 'constant'");
      alpha = std::make_shared<ConstantMetric>(to_matrix(aj["matrix"], base + "/alpha/matrix"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(base + "/alpha: " + ex.what());
  }
  if (aj.contains("dim") && aj["dim"].get<int>() != alpha->dim()) {
    throw ConfigError(base + "/alpha/dim: does not match the matrix size");
  }
  const int n = alpha->dim();

  const Json& bj = def.at("beta");
  const std::string btype = bj.at("type").get<std::string>();
  OneFormPtr beta;
  bool nonzero = false;
  if (btype == "zero") {
    beta = zero_form(alpha);
  } else if (btype == "berwald-beta") {
    beta = std::make_shared<BerwaldBetaForm>(alpha);
    nonzero = true;
  } else {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd off = Eigen::VectorXd::Zero(n);
    if (bj.contains("matrix")) m = to_matrix(bj["matrix"], base + "/beta/matrix");
    if (bj.contains("offset")) off = to_vector(bj["offset"], base + "/beta/offset");
    if (m.rows() != n || m.cols() != n) throw ConfigError(base + "/beta/matrix: must be " + std::to_string(n) + "x" +
                                                          std::to_string(n));
    if (off.size() != n) throw ConfigError(base + "/beta/offset: must have " + std::to_string(n) + " entries");
    nonzero = m.cwiseAbs().maxCoeff() > 0.0 || off.cwiseAbs().maxCoeff() > 0.0;
    beta = std::make_shared<LinearOneForm>(alpha, m, off);
  }

  const std::string phi = def.at("phi").get<std::string>();
  const std::string name = def.value("name", std::string("inline"));
  MetricEntry e;
  try {
    if (phi == "square") {
      const SquarePair pair{alpha, beta};
      e = square_entry(name, pair, square_metric(pair, name), nonzero);
    } else if (phi == "square-tilde") {
      const DeformedPairTilde t{alpha, beta};
      e = square_entry(name, tilde_to_original(t), square_metric(t, name), nonzero);
    } else if (phi == "square-bar") {
      const DeformedPairBar b{alpha, beta};
      e = square_entry(name, bar_to_original(b), bar_to_square(b, name), nonzero);
      e.bar = b;
    } else {
      e.name = name;
      e.metric = std::make_shared<GeneralABMetric>(alpha, beta, phi_library(phi), name);
    }
  } catch (const std::exception& ex) {
    throw ConfigError(base + ": " + ex.what());
  }
  if (def.contains("flag_curvature")) e.flag_curvature = def["flag_curvature"].get<double>();
  if (def.contains("einstein_scale")) e.einstein_scale = def["einstein_scale"].get<double>();
  if (!e.flag_curvature && btype == "zero" && phi == "riemannian" && type == "euclidean") e.flag_curvature = 0.0;
  e.description = "inline (alpha, beta, phi) definition";
  e.source = def;
  return e;
}

ConstructSpec construct_spec_from_json(const Json& j) {
  ConstructSpec s;
  s.dim = j.at("dim").get<int>();
  s.c = j.at("c").get<double>();
  s.d = j.at("d").get<double>();
  s.factor = j.at("factor").get<std::string>();
  return s;
}

MetricEntry make_constructed(const ConstructSpec& spec) {
  if (spec.dim < 3) throw ConfigError("/construct/dim: must be at least 3");
  if (spec.c == 0.0 && spec.d == 0.0) throw ConfigError("/construct: c^2 + d^2 must be nonzero");
  MetricPtr factor;
  if (spec.factor == "sphere") {
    if (spec.c == 0.0) throw ConfigError("/construct/factor: a sphere factor needs c != 0; use 'flat' for c = 0");
    factor = sphere_factor(spec.dim - 1, spec.c * spec.c);
  } else if (spec.factor == "flat") {
    if (spec.c != 0.0) throw ConfigError("/construct/factor: a flat factor is Ricci flat and needs c = 0");
    factor = flat_factor(spec.dim - 1);
  } else {
    throw ConfigError("/construct/factor: unknown factor '" + spec.factor + "'");
  }
  WarpedProductSpec w;
  w.factor = factor;
  w.c = spec.c;
  w.d = spec.d;
  MetricEntry e;
  try {
    const auto bar = build_warped(w);
    std::ostringstream name;
    name << "warped(n=" << spec.dim << ",c=" << spec.c << ",d=" << spec.d << "," << spec.factor << ")";
    e.name = name.str();
    e.bar = bar;
    e.pair = bar_to_original(bar);
    e.metric = bar_to_square(bar, e.name);
    e.warped = std::dynamic_pointer_cast<const WarpedMetric>(bar.alpha);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("/construct: ") + ex.what());
  }
  e.nontrivial_square = true;
  e.einstein_scale = 0.0;
  if (spec.dim <= 4) e.flag_curvature = 0.0;
  e.description = "Einstein square metric from a warped product";
  e.source = metric_document(spec);
  return e;
}

Json metric_document(const ConstructSpec& spec) {
  std::ostringstream name;
  name << "warped-" << spec.factor << "-n" << spec.dim;
  Json doc;
  doc["finsq_metric"] = 1;
  doc["name"] = name.str();
  doc["description"] = "Einstein square metric: bar pair dt^2 + (ct+d)^2 h, (ct+d) dt over a " + spec.factor +
                       " factor, F in bar form";
  doc["construct"] = {{"dim", spec.dim}, {"c", spec.c}, {"d", spec.d}, {"factor", spec.factor}};
  doc["einstein_scale"] = 0.0;
  if (spec.dim <= 4) doc["flag_curvature"] = 0.0;
  return doc;
}

MetricEntry load_metric_document(const Json& doc) {
  const auto issues = metric_schema().validate(doc);
  if (!issues.empty()) throw ConfigError("metric document " + issues.front().to_string());
  MetricEntry e;
  if (doc.contains("construct")) {
    e = make_constructed(construct_spec_from_json(doc["construct"]));
  } else {
    const auto def_issues = config_schema().validate(Json{{"metric", doc["definition"]}, {"suite", {"pde"}}});
    if (!def_issues.empty()) throw ConfigError("metric document /definition" + def_issues.front().to_string().substr(7));
    e = make_inline(doc["definition"]);
  }
  e.name = doc["name"].get<std::string>();
  if (doc.contains("description")) e.description = doc["description"].get<std::string>();
  if (doc.contains("einstein_scale")) e.einstein_scale = doc["einstein_scale"].get<double>();
  if (doc.contains("flag_curvature")) e.flag_curvature = doc["flag_curvature"].get<double>();
  e.source = doc;
  return e;
}

MetricEntry resolve_metric(const std::string& name_or_file, const Json& params, const std::filesystem::path& base_dir) {
  for (const auto& b : builtins())
    if (name_or_file == b.name) return make_builtin(name_or_file, params);
  std::filesystem::path p(name_or_file);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  if (p.extension() == ".json" || std::filesystem::exists(p)) {
    std::ifstream in(p);
    if (!in) throw ConfigError("/metric: cannot open metric document '" + p.string() + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& ex) {
      throw ConfigError("/metric: '" + p.string() + "' is not valid JSON: " + ex.what());
    }
    if (!params.empty()) throw ConfigError("/params: not applicable to a metric document");
    return load_metric_document(doc);
  }
  return make_builtin(name_or_file, params);
}

}  // namespace finsq::app
