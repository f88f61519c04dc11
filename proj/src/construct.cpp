#include "finsq/construct.hpp"

#include <cmath>
#include <limits>
#include <tuple>

namespace finsq {

namespace {

// Fixed, reproducible verification points in the chart ball of radius 0.7.
std::vector<Eigen::VectorXd> verification_points(int m, int count) {
  const CounterRng rng(0x5eedfac7);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < count; ++i) pts.push_back(rng.in_ball(m, 0.7, static_cast<std::uint64_t>(i), 1));
  return pts;
}

void verify_einstein_factor(const RiemannMetric& f, double ricci_scale, const std::string& what) {
  const CounterRng rng(0xfac7);
  int k = 0;
  for (const auto& u : verification_points(f.dim(), 20)) {
    const Eigen::VectorXd y = rng.unit_vector(f.dim(), static_cast<std::uint64_t>(k++), 2);
    const double a2 = y.dot(f.components(u) * y);
    const double ric = riemann_ricci(f, u, y);
    if (std::abs(ric - ricci_scale * a2) > 1e-7 * std::max(1.0, std::abs(ricci_scale) * a2)) {
      throw std::invalid_argument(what + ": factor Ricci " + std::to_string(ric / a2) + " differs from expected " +
                                  std::to_string(ricci_scale));
    }
  }
}

}  // namespace

MetricPtr sphere_factor(int m, double kappa) {
  if (m < 2) throw std::invalid_argument("sphere_factor: dimension must be at least 2");
  auto s = std::make_shared<SphereMetric>(m, kappa);
  verify_einstein_factor(*s, (m - 1) * kappa, "sphere_factor");
  return s;
}

MetricPtr flat_factor(int m) { return std::make_shared<EuclideanMetric>(m); }

WarpedMetric::WarpedMetric(MetricPtr factor, std::vector<double> h_poly, double t_min, double t_max, double h_min,
                           double h_max)
    : factor_(std::move(factor)), h_(std::move(h_poly)), t_min_(t_min), t_max_(t_max), h_min_(h_min), h_max_(h_max) {
  if (!factor_) throw std::invalid_argument("warped metric: null factor");
  if (h_.empty()) throw std::invalid_argument("warped metric: empty warping polynomial");
  if (!(t_min_ < t_max_)) throw std::invalid_argument("warped metric: empty t-interval");
  // t where h is closest to 0.55 (a b- of 0.55 keeps samples well inside b- < 1)
  double best = t_min_;
  for (int i = 0; i <= 1000; ++i) {
    const double t = t_min_ + (t_max_ - t_min_) * i / 1000.0;
    if (std::abs(h(t) - 0.55) < std::abs(h(best) - 0.55)) best = t;
  }
  if (h_.size() == 1) best = 0.5 * (t_min_ + t_max_);
  center_.resize(dim());
  center_(0) = best;
  center_.tail(factor_->dim()) = factor_->chart_center();
}

bool WarpedMetric::in_domain(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) return false;
  const double t = x(0);
  if (t < t_min_ || t > t_max_) return false;
  const double hv = h(t);
  if (!(hv > 0.0) || hv < h_min_ || hv > h_max_) return false;
  return factor_->in_domain(x.tail(factor_->dim()));
}

double WarpedMetric::dh(double t) const {
  double acc = 0.0;
  for (std::size_t k = h_.size(); k-- > 1;) acc = acc * t + static_cast<double>(k) * h_[k];
  return acc;
}

double WarpedMetric::ddh(double t) const {
  double acc = 0.0;
  for (std::size_t k = h_.size(); k-- > 2;) acc = acc * t + static_cast<double>(k * (k - 1)) * h_[k];
  return acc;
}

WarpedOneForm::WarpedOneForm(std::shared_ptr<const WarpedMetric> metric)
    : OneFormImpl(metric), warped_(std::move(metric)) {}

DeformedPairBar build_warped(const WarpedProductSpec& spec) {
  if (!spec.factor) throw std::invalid_argument("build_warped: missing factor");
  if (spec.c == 0.0 && spec.d == 0.0) throw std::invalid_argument("build_warped: c^2 + d^2 must be nonzero");
  if (!(spec.h_min > 0.0) || !(spec.h_min < spec.h_max)) {
    throw std::invalid_argument("build_warped: need 0 < h_min < h_max");
  }
  const int n = spec.factor->dim() + 1;
  verify_einstein_factor(*spec.factor, (n - 2) * spec.c * spec.c, "build_warped");

  double t0 = 0.0;
  double t1 = 0.0;
  if (spec.t_range) {
    std::tie(t0, t1) = *spec.t_range;
    if (!(t0 < t1)) throw std::invalid_argument("build_warped: empty t-interval");
    if (spec.c * t0 + spec.d <= 0.0 || spec.c * t1 + spec.d <= 0.0) {
      throw DomainError("build_warped: ct + d <= 0 inside the requested t-interval");
    }
  } else if (spec.c != 0.0) {
    t0 = (spec.h_min - spec.d) / spec.c;
    t1 = (spec.h_max - spec.d) / spec.c;
    if (t0 > t1) std::swap(t0, t1);
  } else {
    if (spec.d <= 0.0) throw DomainError("build_warped: ct + d = d <= 0");
    t0 = -1.0;
    t1 = 1.0;
  }
  // explicit t-intervals and constant h are bounded by t alone
  const bool by_t = spec.t_range.has_value() || spec.c == 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  auto metric = std::make_shared<WarpedMetric>(spec.factor, std::vector<double>{spec.d, spec.c}, t0, t1,
                                               by_t ? 0.0 : spec.h_min, by_t ? inf : spec.h_max);
  return {metric, std::make_shared<WarpedOneForm>(metric)};
}

double warped_ricci_residual(const WarpedMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = metric.dim();
  const int m = n - 1;
  const double t = x(0);
  const Eigen::VectorXd u = x.tail(m);
  const Eigen::VectorXd yu = y.tail(m);
  const double h = metric.h(t);
  const double h1 = metric.dh(t);
  const double h2 = metric.ddh(t);
  const double f2 = yu.dot(metric.factor()->components(u) * yu);
  const double factor_ric = riemann_ricci(*metric.factor(), u, yu);
  const double formula = factor_ric - (n - 1) * (h2 / h) * y(0) * y(0) - (h2 * h + (n - 2) * h1 * h1) * f2;
  const double a2 = y.dot(metric.components(x) * y);
  return std::abs(riemann_ricci(metric, x, y) - formula) / a2;
}

ABMetricPtr bar_to_square(const DeformedPairBar& pair, std::string name) {
  const Eigen::VectorXd c = pair.alpha->chart_center();
  if (!pair.alpha->in_domain(c)) throw DomainError("bar_to_square: chart center outside the metric's domain");
  if (!(pair.b(c) < 1.0)) throw DomainError("bar_to_square: b >= 1 at the chart center");
  return square_metric(pair, std::move(name));
}

DeformedPairBar berwald_family_pair(int n, const BerwaldFamilySpec& spec) {
  Eigen::VectorXd a = spec.a.size() == 0 ? Eigen::VectorXd::Zero(n) : spec.a;
  if (a.size() != n) throw std::invalid_argument("berwald_family: offset has the wrong dimension");
  if (spec.c == 0.0 && !(a.norm() < 1.0)) throw DomainError("berwald_family: |cx + a| < 1 is empty");
  const Eigen::VectorXd center = spec.c == 0.0 ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(-a / spec.c);
  auto e = std::make_shared<EuclideanMetric>(n, center);
  auto beta = std::make_shared<LinearOneForm>(e, spec.c * Eigen::MatrixXd::Identity(n, n), a);
  return {e, beta};
}

ABMetricPtr berwald_family(int n, const BerwaldFamilySpec& spec) {
  return bar_to_square(berwald_family_pair(n, spec), "berwald-family");
}

SquarePair berwald_pair(int n) {
  auto a = std::make_shared<BerwaldAlphaMetric>(n);
  return {a, std::make_shared<BerwaldBetaForm>(a)};
}

ABMetricPtr berwald_metric(int n) { return square_metric(berwald_pair(n), "berwald"); }

}  // namespace finsq
