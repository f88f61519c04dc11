#pragma once

// Einstein square metrics: the warped-product recipe in bar form, the
// Berwald family, and the Einstein factor metrics they are built from.

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finsq/square.hpp"

namespace finsq {

/// Stereographic chart of the m-sphere of curvature kappa; Ricci checked at 20 points to 1e-7.
MetricPtr sphere_factor(int m, double kappa);
/// Flat factor (Euclidean chart).
MetricPtr flat_factor(int m);

/// dt^2 + h(t)^2 f(u) on the chart (t, u^1..u^m), with h a polynomial in t.
class WarpedMetric final : public RiemannMetricImpl<WarpedMetric> {
 public:
  /// h(t) = sum_k h_poly[k] t^k on t_min <= t <= t_max, restricted to h >= h_min.
  WarpedMetric(MetricPtr factor, std::vector<double> h_poly, double t_min, double t_max, double h_min = 0.0,
               double h_max = std::numeric_limits<double>::infinity());

  int dim() const override { return factor_->dim() + 1; }
  std::string name() const override { return "warped(" + factor_->name() + ")"; }
  bool in_domain(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd chart_center() const override { return center_; }

  const MetricPtr& factor() const { return factor_; }
  const std::vector<double>& h_poly() const { return h_; }
  std::pair<double, double> t_range() const { return {t_min_, t_max_}; }
  double h(double t) const { return h_at<double>(t); }
  double dh(double t) const;
  double ddh(double t) const;

  template <class S>
  S h_at(const S& t) const {
    S acc(0.0);
    for (auto it = h_.rbegin(); it != h_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    const int m = factor_->dim();
    const VecX<S> u = x.tail(m);
    const MatX<S> f = factor_->components(u);
    const S h = h_at<S>(x(0));
    const S h2 = h * h;
    MatX<S> a(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) a(i, j) = S(0.0);
    a(0, 0) = S(1.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i + 1, j + 1) = f(i, j) * h2;
    return a;
  }

 private:
  MetricPtr factor_;
  std::vector<double> h_;
  double t_min_;
  double t_max_;
  double h_min_;
  double h_max_;
  Eigen::VectorXd center_;
};

/// h(t) dt on a warped chart.
class WarpedOneForm final : public OneFormImpl<WarpedOneForm> {
 public:
  explicit WarpedOneForm(std::shared_ptr<const WarpedMetric> metric);
  std::string name() const override { return "h(t) dt"; }
  template <class S>
  VecX<S> eval(const VecX<S>& x) const {
    VecX<S> b(x.size());
    b(0) = warped_->h_at<S>(x(0));
    for (Eigen::Index i = 1; i < x.size(); ++i) b(i) = S(0.0);
    return b;
  }

 private:
  std::shared_ptr<const WarpedMetric> warped_;
};

struct WarpedProductSpec {
  MetricPtr factor;
  double c = 0.0;
  double d = 0.0;
  /// Bounds of h = ct + d on the chart.
  double h_min = 0.2;
  double h_max = 2.0;
  /// Explicit t-interval; derived from the h bounds when absent.
  std::optional<std::pair<double, double>> t_range;
};

/// alpha-^2 = dt^2 + (ct + d)^2 f, beta- = (ct + d) dt.
DeformedPairBar build_warped(const WarpedProductSpec& spec);

/// |Ric numerically - Ric_f + (n-1)(h''/h)(y^0)^2 + [h'' h + (n-2) h'^2] f(y_u, y_u)| / alpha-^2.
double warped_ricci_residual(const WarpedMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// F from a bar pair; throws DomainError when b- >= 1 at the chart center.
ABMetricPtr bar_to_square(const DeformedPairBar& pair, std::string name = "square-bar");

struct BerwaldFamilySpec {
  double c = 1.0;
  Eigen::VectorXd a;  // empty means zero
};

/// Bar pair (|y|, <cx + a, y>) of the family.
DeformedPairBar berwald_family_pair(int n, const BerwaldFamilySpec& spec);
ABMetricPtr berwald_family(int n, const BerwaldFamilySpec& spec);

/// Berwald's metric on the unit ball, directly from its (alpha, beta).
SquarePair berwald_pair(int n);
ABMetricPtr berwald_metric(int n);

}  // namespace finsq
