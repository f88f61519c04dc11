#include "finsq/square.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>

#include "finsq/parallel.hpp"

namespace finsq {

namespace {

template <class R, class F>
std::vector<std::optional<R>> per_sample(const SampleSet& set, F&& fn) {
  return parallel_map<std::optional<R>>(set.samples.size(), [&](std::size_t i) -> std::optional<R> {
    try {
      return fn(set.samples[i]);
    } catch (const DomainError&) {
      return std::nullopt;
    } catch (const SingularError&) {
      return std::nullopt;
    }
  });
}

template <class R>
std::vector<R> collect(const std::vector<std::optional<R>>& raw, Certificate& cert, std::size_t pre_skipped) {
  std::vector<R> out;
  for (const auto& r : raw) {
    if (r) out.push_back(*r);
  }
  cert.samples_used = out.size();
  cert.samples_skipped = pre_skipped + (raw.size() - out.size());
  if (out.empty()) cert.reason = "no usable samples";
  return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// c minimizing sum |B - c M|^2.
double fit_constant(const std::vector<Eigen::MatrixXd>& bs, const std::vector<Eigen::MatrixXd>& ms) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    num += (bs[i].array() * ms[i].array()).sum();
    den += ms[i].squaredNorm();
  }
  if (!(den > 0.0)) throw SingularError("degenerate least-squares fit of c");
  return num / den;
}

Eigen::VectorXd vx(const Eigen::VectorXd& x) { return x; }

double einstein_bracket(int n, double b2, double s2) {
  return -(5.0 * (n - 1) + 2.0 * (2 * n - 5) * b2) + 6.0 * (n - 2) * s2;
}

void require_b_below_one(const MetricPtr& alpha, const OneFormPtr& beta, const char* what) {
  if (!alpha || !beta) throw std::invalid_argument(std::string(what) + ": null metric or 1-form");
  const Eigen::VectorXd c = alpha->chart_center();
  if (alpha->in_domain(c) && beta_norm(*alpha, *beta, c) >= 1.0) {
    throw DomainError(std::string(what) + ": b >= 1 at the chart center");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// profiles

PhiPtr phi_library(const std::string& name) {
  if (name == "square") return std::make_shared<SquarePhi>();
  if (name == "square-tilde") return std::make_shared<SquareTildePhi>();
  if (name == "square-bar") return std::make_shared<SquareBarPhi>();
  if (name == "randers-nav") return std::make_shared<RandersNavPhi>();
  if (name == "riemannian") return std::make_shared<RiemannianPhi>();
  if (name == "randers") return std::make_shared<RandersPhi>();
  throw std::invalid_argument("unknown phi '" + name + "'");
}

std::vector<std::string> phi_names() {
  return {"square", "square-tilde", "square-bar", "randers-nav", "riemannian", "randers"};
}

double pde_residual(const PhiFunction& phi, double b2, double s) {
  if (phi.kind() != PhiKind::general) throw std::invalid_argument("pde_residual: phi '" + phi.name() + "' is plain");
  if (!phi.in_domain(b2, s)) throw DomainError("pde_residual: (b^2, s) outside the domain of '" + phi.name() + "'");
  const auto p = phi_partials(phi, b2, s);
  return p.d22 - 2.0 * (p.d1 - s * p.d12);
}

// ---------------------------------------------------------------------------
// deformations

detail::PairWrapper::PairWrapper(MetricPtr alpha, OneFormPtr beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (!alpha_ || !beta_) throw std::invalid_argument("deformation: null metric or 1-form");
  if (alpha_->dim() != beta_->dim()) throw std::invalid_argument("deformation: dimension mismatch");
}

namespace {

const char* suffix(Deformation kind) {
  switch (kind) {
    case Deformation::tilde:
      return "tilde";
    case Deformation::tilde_inverse:
      return "tilde-inverse";
    case Deformation::bar:
      return "bar";
    case Deformation::bar_inverse:
      return "bar-inverse";
  }
  return "?";
}

}  // namespace

DeformedMetric::DeformedMetric(MetricPtr alpha, OneFormPtr beta, Deformation kind)
    : PairWrapper(std::move(alpha), std::move(beta)), kind_(kind) {}

std::string DeformedMetric::name() const { return alpha_->name() + "/" + suffix(kind_); }

bool DeformedMetric::in_domain(const Eigen::VectorXd& x) const {
  if (!alpha_->in_domain(x)) return false;
  if (kind_ == Deformation::tilde_inverse) return true;
  const double b2 = detail::norm2<double>(*alpha_, *beta_, vx(x));
  return std::isfinite(b2) && b2 < 1.0;
}

DeformedOneForm::DeformedOneForm(MetricPtr deformed_metric, MetricPtr alpha, OneFormPtr beta, Deformation kind)
    : OneFormImpl(std::move(deformed_metric)), PairWrapper(std::move(alpha), std::move(beta)), kind_(kind) {}

std::string DeformedOneForm::name() const { return beta_->name() + "/" + suffix(kind_); }

namespace {

std::pair<MetricPtr, OneFormPtr> wrap(const MetricPtr& alpha, const OneFormPtr& beta, Deformation kind) {
  auto m = std::make_shared<DeformedMetric>(alpha, beta, kind);
  auto f = std::make_shared<DeformedOneForm>(m, alpha, beta, kind);
  return {m, f};
}

}  // namespace

DeformedPairTilde deform_to_tilde(const SquarePair& pair) {
  require_b_below_one(pair.alpha, pair.beta, "deform_to_tilde");
  auto [m, f] = wrap(pair.alpha, pair.beta, Deformation::tilde);
  return {m, f};
}

SquarePair tilde_to_original(const DeformedPairTilde& pair) {
  auto [m, f] = wrap(pair.alpha, pair.beta, Deformation::tilde_inverse);
  return {m, f};
}

DeformedPairBar deform_to_bar(const SquarePair& pair) {
  require_b_below_one(pair.alpha, pair.beta, "deform_to_bar");
  auto [m, f] = wrap(pair.alpha, pair.beta, Deformation::bar);
  return {m, f};
}

SquarePair bar_to_original(const DeformedPairBar& pair) {
  require_b_below_one(pair.alpha, pair.beta, "bar_to_original");
  auto [m, f] = wrap(pair.alpha, pair.beta, Deformation::bar_inverse);
  return {m, f};
}

ABMetricPtr square_metric(const SquarePair& pair, std::string name) {
  return std::make_shared<GeneralABMetric>(pair.alpha, pair.beta, std::make_shared<SquarePhi>(), std::move(name));
}

ABMetricPtr square_metric(const DeformedPairTilde& pair, std::string name) {
  return std::make_shared<GeneralABMetric>(pair.alpha, pair.beta, std::make_shared<SquareTildePhi>(), std::move(name));
}

ABMetricPtr square_metric(const DeformedPairBar& pair, std::string name) {
  return std::make_shared<GeneralABMetric>(pair.alpha, pair.beta, std::make_shared<SquareBarPhi>(), std::move(name));
}

// ---------------------------------------------------------------------------
// bookkeeping

void ResidualStats::add(double v) {
  if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
  v = std::abs(v);
  ++count;
  max = std::max(max, v);
  sum += v;
}

void ResidualStats::merge(const ResidualStats& other) {
  count += other.count;
  max = std::max(max, other.max);
  sum += other.sum;
}

bool Certificate::pass() const {
  if (!reason.empty() || checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass()) return false;
  return true;
}

double Certificate::max_residual() const {
  double m = 0.0;
  for (const auto& c : checks) m = std::max(m, c.stats.max);
  return m;
}

double Certificate::mean_residual() const {
  if (checks.empty()) return 0.0;
  double m = 0.0;
  for (const auto& c : checks) m = std::max(m, c.stats.mean());
  return m;
}

const SubCheck* Certificate::find(const std::string& check) const {
  for (const auto& c : checks)
    if (c.name == check) return &c;
  return nullptr;
}

double Certificate::constant(const std::string& key) const {
  for (const auto& [k, v] : fitted)
    if (k == key) return v;
  throw std::out_of_range("certificate has no constant '" + key + "'");
}

// ---------------------------------------------------------------------------
// checkers

double extract_tau(const SquarePair& pair, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd a = pair.alpha->components(x);
  const Eigen::VectorXd b = pair.beta->components(x);
  const Eigen::MatrixXd bij = covariant_derivative(*pair.alpha, *pair.beta, x);
  const auto n = static_cast<double>(a.rows());
  const double b2 = dual_norm2<double>(a, b);
  const double trace = (a.llt().solve(bij)).trace();
  return trace / (n * (1.0 + 2.0 * b2) - 3.0 * b2);
}

namespace {

struct PairRecord {
  Eigen::MatrixXd bij;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double b2 = 0.0;
  double s2 = 0.0;          // (beta / alpha)^2
  double ric_alpha = 0.0;   // Ric_alpha / alpha^2
  Eigen::MatrixXd shape;    // (1 - b^2)((1 + 2b^2) a - 3 b b^T)
};

PairRecord pair_record(const SquarePair& pair, const Sample& s) {
  PairRecord r;
  r.a = pair.alpha->components(s.x);
  r.b = pair.beta->components(s.x);
  r.b2 = dual_norm2<double>(r.a, r.b);
  if (!(r.b2 < 1.0)) throw DomainError("b >= 1");
  r.bij = covariant_derivative(*pair.alpha, *pair.beta, s.x);
  const double a2 = s.y.dot(r.a * s.y);
  const double beta = r.b.dot(s.y);
  r.s2 = beta * beta / a2;
  r.ric_alpha = riemann_ricci(*pair.alpha, s.x, s.y) / a2;
  r.shape = (1.0 - r.b2) * ((1.0 + 2.0 * r.b2) * r.a - 3.0 * r.b * r.b.transpose());
  return r;
}

struct Eq6Fit {
  double c = 0.0;
  ResidualStats stats;
};

Eq6Fit fit_eq6(const std::vector<PairRecord>& recs) {
  std::vector<Eigen::MatrixXd> bs, ms;
  for (const auto& r : recs) {
    bs.push_back(r.bij);
    ms.push_back(r.shape);
  }
  Eq6Fit fit;
  fit.c = fit_constant(bs, ms);
  for (const auto& r : recs) fit.stats.add(max_abs(r.bij - fit.c * r.shape) / (1.0 + max_abs(r.bij)));
  return fit;
}

}  // namespace

EinsteinCertificate check_theorem_1_1(const SquarePair& pair, const SampleSet& samples, double tol) {
  Certificate cert;
  cert.name = "square-einstein";
  const auto f = square_metric(pair);
  struct Rec {
    PairRecord pr;
    double ricci_f = 0.0;
  };
  const auto raw = per_sample<Rec>(samples, [&](const Sample& s) {
    Rec r{pair_record(pair, s), 0.0};
    const auto data = curvature(*f, s.x, s.y);
    r.ricci_f = data.ricci / data.f2;
    return r;
  });
  const auto recs = collect(raw, cert, samples.skipped);
  if (recs.empty()) return cert;
  if (recs.size() < 2) {
    cert.reason = "fewer than 2 usable samples";
    return cert;
  }
  std::vector<PairRecord> prs;
  for (const auto& r : recs) prs.push_back(r.pr);
  const Eq6Fit fit = fit_eq6(prs);
  const int n = pair.alpha->dim();
  SubCheck eq5{"alpha-ricci", {}, tol};
  SubCheck flat{"ricci-flat", {}, tol};
  for (const auto& r : recs) {
    const double q = 1.0 - r.pr.b2;
    const double rhs = fit.c * fit.c * q * q * einstein_bracket(n, r.pr.b2, r.pr.s2);
    eq5.stats.add((r.pr.ric_alpha - rhs) / (1.0 + std::abs(rhs)));
    flat.stats.add(r.ricci_f);
  }
  cert.checks.push_back(std::move(eq5));
  cert.checks.push_back({"conformal-shape", fit.stats, tol});
  cert.checks.push_back(std::move(flat));
  cert.fitted.emplace_back("square_constant", fit.c);
  return cert;
}

EinsteinCertificate check_theorem_2_1(const SquarePair& pair, const SampleSet& samples, double tol) {
  Certificate cert;
  cert.name = "tau-form";
  const int n = pair.alpha->dim();
  struct Rec {
    PairRecord pr;
    double tau = 0.0;
    double eq17 = 0.0;
  };
  const auto raw = per_sample<Rec>(samples, [&](const Sample& s) {
    Rec r{pair_record(pair, s), 0.0, 0.0};
    // tau as a field: jets of a, b and b_i|j to first order
    const auto xs = seed(s.x, Eigen::MatrixXd::Identity(n, n), 1);
    VecX<Jet1> xv(n);
    for (int i = 0; i < n; ++i) xv(i) = xs[static_cast<std::size_t>(i)];
    const MatX<Jet1> a = pair.alpha->components(xv);
    const VecX<Jet1> b = pair.beta->components(xv);
    const MatX<Jet1> bij = covariant_derivative_jets(*pair.alpha, *pair.beta, s.x, 1);
    const MatX<Jet1> ainv = inverse_spd<Jet1>(a);
    Jet1 trace(0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) trace += ainv(i, j) * bij(i, j);
    const Jet1 b2 = dual_norm2<Jet1>(a, b);
    const Jet1 tau = trace / (b2 * (2.0 * n - 3.0) + static_cast<double>(n));
    r.tau = tau.value();
    double worst = 0.0;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rhs = -2.0 * r.tau * r.tau * b(i).value();
      worst = std::max(worst, std::abs(derivative(tau, i).value() - rhs));
      scale = std::max(scale, std::abs(rhs));
    }
    r.eq17 = worst / (1.0 + scale);
    return r;
  });
  const auto recs = collect(raw, cert, samples.skipped);
  if (recs.empty()) return cert;
  if (recs.size() < 2) {
    cert.reason = "fewer than 2 usable samples";
    return cert;
  }
  SubCheck eq15{"tau-ricci", {}, tol};
  SubCheck eq16{"tau-shape", {}, tol};
  SubCheck eq17{"tau-gradient", {}, tol};
  SubCheck lemma{"tau-over-one-minus-b2", {}, tol};
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : recs) {
    const auto& p = r.pr;
    const Eigen::MatrixXd shape = (1.0 + 2.0 * p.b2) * p.a - 3.0 * p.b * p.b.transpose();
    eq16.stats.add(max_abs(p.bij - r.tau * shape) / (1.0 + max_abs(p.bij)));
    const double rhs = r.tau * r.tau * einstein_bracket(n, p.b2, p.s2);
    eq15.stats.add((p.ric_alpha - rhs) / (1.0 + std::abs(rhs)));
    eq17.stats.add(r.eq17);
    num += r.tau * (1.0 - p.b2);
    den += (1.0 - p.b2) * (1.0 - p.b2);
    cert.tau.push_back(r.tau);
  }
  const double c = num / den;
  for (const auto& r : recs) lemma.stats.add((r.tau / (1.0 - r.pr.b2) - c) / (1.0 + std::abs(c)));
  cert.checks.push_back(std::move(eq15));
  cert.checks.push_back(std::move(eq16));
  cert.checks.push_back(std::move(eq17));
  cert.checks.push_back(std::move(lemma));
  cert.fitted.emplace_back("square_constant", c);
  return cert;
}

Certificate check_closed(const SquarePair& pair, const SampleSet& samples, double tol) {
  Certificate cert;
  cert.name = "closed";
  struct Rec {
    double s = 0.0;
    double s0 = 0.0;
  };
  const auto raw = per_sample<Rec>(samples, [&](const Sample& s) {
    const Eigen::MatrixXd a = pair.alpha->components(s.x);
    const Eigen::VectorXd b = pair.beta->components(s.x);
    const auto d = split_rs(covariant_derivative(*pair.alpha, *pair.beta, s.x), a, b, s.y);
    return Rec{max_abs(d.s), d.s_up_0.dot(d.s_i0) / s.y.dot(a * s.y)};
  });
  const auto recs = collect(raw, cert, samples.skipped);
  SubCheck sij{"s_ij", {}, tol};
  SubCheck sk0{"s^k_0 s_k0", {}, tol};
  for (const auto& r : recs) {
    sij.stats.add(r.s);
    sk0.stats.add(r.s0);
  }
  cert.checks.push_back(std::move(sij));
  cert.checks.push_back(std::move(sk0));
  return cert;
}

namespace {

struct ConformalRecord {
  Eigen::MatrixXd bij;
  Eigen::MatrixXd shape;
  double ric = 0.0;  // Ric / alpha^2 of the pair's metric
};

template <class Pair>
Certificate conformal_check(const Pair& pair, const SampleSet& samples, double tol, const std::string& name,
                            bool tilde) {
  Certificate cert;
  cert.name = name;
  const int n = pair.alpha->dim();
  const auto raw = per_sample<ConformalRecord>(samples, [&](const Sample& s) {
    ConformalRecord r;
    const Eigen::MatrixXd a = pair.alpha->components(s.x);
    const Eigen::VectorXd b = pair.beta->components(s.x);
    const double b2 = dual_norm2<double>(a, b);
    r.bij = covariant_derivative(*pair.alpha, *pair.beta, s.x);
    r.shape = tilde ? Eigen::MatrixXd(std::sqrt(1.0 + b2) * a) : a;
    r.ric = riemann_ricci(*pair.alpha, s.x, s.y) / s.y.dot(a * s.y);
    return r;
  });
  const auto recs = collect(raw, cert, samples.skipped);
  if (recs.empty()) return cert;
  std::vector<Eigen::MatrixXd> bs, ms;
  for (const auto& r : recs) {
    bs.push_back(r.bij);
    ms.push_back(r.shape);
  }
  const double c = fit_constant(bs, ms);
  SubCheck ricci{tilde ? "einstein" : "ricci-flat", {}, tol};
  SubCheck conformal{"conformal", {}, tol};
  for (const auto& r : recs) {
    const double rhs = tilde ? -(n - 1) * c * c : 0.0;
    ricci.stats.add((r.ric - rhs) / (1.0 + std::abs(rhs)));
    conformal.stats.add(max_abs(r.bij - c * r.shape) / (1.0 + max_abs(r.bij)));
  }
  cert.checks.push_back(std::move(ricci));
  cert.checks.push_back(std::move(conformal));
  cert.fitted.emplace_back("square_constant", c);
  return cert;
}

}  // namespace

Certificate check_tilde_conditions(const DeformedPairTilde& pair, const SampleSet& samples, double tol) {
  return conformal_check(pair, samples, tol, "tilde-conditions", true);
}

Certificate check_bar_conditions(const DeformedPairBar& pair, const SampleSet& samples, double tol) {
  return conformal_check(pair, samples, tol, "bar-conditions", false);
}

Certificate check_deformations(const SquarePair& pair, const SampleSet& samples, double alg_tol, double f_tol) {
  Certificate cert;
  cert.name = "deformation";
  const auto tilde = deform_to_tilde(pair);
  const auto bar = deform_to_bar(pair);
  const auto back_tilde = tilde_to_original(tilde);
  const auto back_bar = bar_to_original(bar);
  const auto f3 = square_metric(pair);
  const auto f8 = square_metric(tilde);
  const auto f10 = square_metric(bar);
  struct Rec {
    double tilde_norm, bar_norm, tilde_trip, bar_trip, f;
  };
  auto round_trip = [](const SquarePair& orig, const SquarePair& back, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd a = orig.alpha->components(x);
    const Eigen::VectorXd b = orig.beta->components(x);
    const double da = max_abs(back.alpha->components(x) - a) / max_abs(a);
    const double db = max_abs(back.beta->components(x) - b) / std::max(max_abs(b), 1e-300);
    return std::max(da, db);
  };
  const auto raw = per_sample<Rec>(samples, [&](const Sample& s) {
    Rec r{};
    const double b = beta_norm(*pair.alpha, *pair.beta, s.x);
    const double bt = tilde.b(s.x);
    r.tilde_norm = (1.0 + bt * bt) * (1.0 - b * b) - 1.0;
    r.bar_norm = bar.b(s.x) - b;
    r.tilde_trip = round_trip(pair, back_tilde, s.x);
    r.bar_trip = round_trip(pair, back_bar, s.x);
    const double v3 = f_value(*f3, s.x, s.y);
    r.f = std::max(std::abs(f_value(*f8, s.x, s.y) - v3), std::abs(f_value(*f10, s.x, s.y) - v3)) / v3;
    return r;
  });
  const auto recs = collect(raw, cert, samples.skipped);
  SubCheck c1{"tilde-norm", {}, alg_tol}, c2{"bar-norm", {}, alg_tol}, c3{"tilde-round-trip", {}, alg_tol},
      c4{"bar-round-trip", {}, alg_tol}, c5{"f-expressions", {}, f_tol};
  for (const auto& r : recs) {
    c1.stats.add(r.tilde_norm);
    c2.stats.add(r.bar_norm);
    c3.stats.add(r.tilde_trip);
    c4.stats.add(r.bar_trip);
    c5.stats.add(r.f);
  }
  cert.checks = {c1, c2, c3, c4, c5};
  return cert;
}

Certificate check_pde(double tol, int grid, double max_b2) {
  Certificate cert;
  cert.name = "pde";
  if (grid < 2) throw std::invalid_argument("check_pde: grid must have at least 2 points per axis");
  for (const char* name : {"square-tilde", "square-bar", "randers-nav"}) {
    const auto phi = phi_library(name);
    SubCheck sc{name, {}, tol};
    for (int i = 0; i < grid; ++i) {
      const double b2 = max_b2 * i / (grid - 1);
      const double b = std::sqrt(b2);
      for (int j = 0; j < grid; ++j) {
        const double s = -b + 2.0 * b * j / (grid - 1);
        sc.stats.add(pde_residual(*phi, b2, s));
      }
    }
    cert.checks.push_back(std::move(sc));
  }
  cert.samples_used = static_cast<std::size_t>(grid * grid);
  return cert;
}

Certificate check_douglas(const FinslerMetric& metric, const SampleSet& samples, double tol) {
  Certificate cert;
  cert.name = "douglas";
  const auto raw = per_sample<double>(samples, [&](const Sample& s) {
    return douglas_tensor(metric, s.x, s.y).max_abs() * f_value(metric, s.x, s.y);
  });
  const auto recs = collect(raw, cert, samples.skipped);
  SubCheck d{"douglas", {}, tol};
  for (double v : recs) d.stats.add(v);
  cert.checks.push_back(std::move(d));
  return cert;
}

namespace {

ResidualStats spray_deformation_stats(const SquarePair& pair, Deformation which, const SampleSet& samples,
                                      Certificate& cert) {
  const auto deformed = std::make_shared<DeformedMetric>(pair.alpha, pair.beta, which);
  const double k = which == Deformation::tilde ? 2.0 : 3.0;
  const auto raw = per_sample<double>(samples, [&](const Sample& s) {
    const Eigen::MatrixXd a = pair.alpha->components(s.x);
    const Eigen::VectorXd b = pair.beta->components(s.x);
    const double tau = extract_tau(pair, s.x);
    const double a2 = s.y.dot(a * s.y);
    const Eigen::VectorXd b_up = a.llt().solve(b);
    const Eigen::VectorXd g = riemann_spray(*pair.alpha, s.x, s.y);
    const Eigen::VectorXd gd = riemann_spray(*deformed, s.x, s.y);
    const Eigen::VectorXd q = tau * (a2 * b_up - k * b.dot(s.y) * s.y);
    return max_abs(gd - g - q) / std::max(a2, max_abs(gd));
  });
  ResidualStats stats;
  for (double v : collect(raw, cert, samples.skipped)) stats.add(v);
  return stats;
}

void require_eq6(const SquarePair& pair, const SampleSet& samples, double tol) {
  Certificate scratch;
  const auto raw = per_sample<PairRecord>(samples, [&](const Sample& s) { return pair_record(pair, s); });
  const auto recs = collect(raw, scratch, 0);
  if (recs.empty()) throw PreconditionError("spray deformation: no usable samples");
  const Eq6Fit fit = fit_eq6(recs);
  if (!(fit.stats.max <= tol)) {
    throw PreconditionError("spray deformation: b_i|j is not of the form c(1-b^2){(1+2b^2)a_ij - 3b_ib_j} (residual " +
                            std::to_string(fit.stats.max) + ")");
  }
}

}  // namespace

double spray_deformation_residual(const SquarePair& pair, Deformation which, const SampleSet& samples, double tol) {
  if (which != Deformation::tilde && which != Deformation::bar) {
    throw std::invalid_argument("spray_deformation_residual: which must be tilde or bar");
  }
  require_eq6(pair, samples, tol);
  Certificate scratch;
  const auto stats = spray_deformation_stats(pair, which, samples, scratch);
  if (stats.count == 0) throw PreconditionError("spray deformation: no usable samples");
  return stats.max;
}

Certificate check_spray_deformation(const SquarePair& pair, const SampleSet& samples, double tol,
                                    double precondition_tol) {
  Certificate cert;
  cert.name = "spray-deform";
  try {
    require_eq6(pair, samples, precondition_tol);
  } catch (const PreconditionError& e) {
    cert.reason = e.what();
    return cert;
  } catch (const SingularError& e) {
    cert.reason = e.what();
    return cert;
  }
  cert.checks.push_back({"tilde", spray_deformation_stats(pair, Deformation::tilde, samples, cert), tol});
  cert.checks.push_back({"bar", spray_deformation_stats(pair, Deformation::bar, samples, cert), tol});
  return cert;
}

}  // namespace finsq
