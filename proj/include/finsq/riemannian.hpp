#pragma once

// Riemannian metrics and 1-forms on a chart, and the quantities of alpha
// that the (alpha, beta) machinery is built on: Christoffel symbols, the
// geodesic spray, Ricci curvature, and the covariant derivative of beta
// with its symmetric / antisymmetric split.
//
// Sign convention: Ric(y) = R_jk y^j y^k with R_jk = R^i_jik, so that the
// round sphere of curvature k in dimension m has Ric = (m - 1) k alpha^2.

#include <memory>
#include <string>
#include <vector>

#include "finsq/linalg.hpp"
#include "finsq/types.hpp"

namespace finsq {

/// Chart-local metric a_ij(x), evaluable on every scalar of the jet tower.
class RiemannMetric {
 public:
  virtual ~RiemannMetric() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  /// Chart validity region.
  virtual bool in_domain(const Eigen::VectorXd& x) const {
    (void)x;
    return true;
  }
  /// Where samplers center their ball by default.
  virtual Eigen::VectorXd chart_center() const { return Eigen::VectorXd::Zero(dim()); }

  virtual MatX<double> components(const VecX<double>& x) const = 0;
  virtual MatX<Jet1> components(const VecX<Jet1>& x) const = 0;
  virtual MatX<Jet2> components(const VecX<Jet2>& x) const = 0;
};

using MetricPtr = std::shared_ptr<const RiemannMetric>;

/// Implements the per-scalar virtuals by forwarding to `Derived::eval<S>`.
template <class Derived>
class RiemannMetricImpl : public RiemannMetric {
 public:
  MatX<double> components(const VecX<double>& x) const final { return self().template eval<double>(x); }
  MatX<Jet1> components(const VecX<Jet1>& x) const final { return self().template eval<Jet1>(x); }
  MatX<Jet2> components(const VecX<Jet2>& x) const final { return self().template eval<Jet2>(x); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// Component functions b_i(x) of a 1-form, tied to the metric that measures it.
class OneFormField {
 public:
  explicit OneFormField(MetricPtr metric) : metric_(std::move(metric)) {
    if (!metric_) throw std::invalid_argument("one-form: parent metric is null");
  }
  virtual ~OneFormField() = default;

  const MetricPtr& metric() const noexcept { return metric_; }
  int dim() const { return metric_->dim(); }
  virtual std::string name() const = 0;

  virtual VecX<double> components(const VecX<double>& x) const = 0;
  virtual VecX<Jet1> components(const VecX<Jet1>& x) const = 0;
  virtual VecX<Jet2> components(const VecX<Jet2>& x) const = 0;

 private:
  MetricPtr metric_;
};

using OneFormPtr = std::shared_ptr<const OneFormField>;

template <class Derived>
class OneFormImpl : public OneFormField {
 public:
  using OneFormField::OneFormField;
  VecX<double> components(const VecX<double>& x) const final { return self().template eval<double>(x); }
  VecX<Jet1> components(const VecX<Jet1>& x) const final { return self().template eval<Jet1>(x); }
  VecX<Jet2> components(const VecX<Jet2>& x) const final { return self().template eval<Jet2>(x); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

namespace detail {
template <class S>
MatX<S> scaled_identity(int n, const S& w) {
  MatX<S> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = i == j ? w : S(0.0);
  return a;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// built-in metrics

class EuclideanMetric final : public RiemannMetricImpl<EuclideanMetric> {
 public:
  explicit EuclideanMetric(int n);
  EuclideanMetric(int n, Eigen::VectorXd center);
  int dim() const override { return n_; }
  std::string name() const override { return "euclidean"; }
  Eigen::VectorXd chart_center() const override { return center_; }
  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    (void)x;
    return detail::scaled_identity<S>(n_, S(1.0));
  }

 private:
  int n_;
  Eigen::VectorXd center_;
};

/// Constant symmetric positive definite a_ij.
class ConstantMetric final : public RiemannMetricImpl<ConstantMetric> {
 public:
  explicit ConstantMetric(Eigen::MatrixXd a);
  int dim() const override { return static_cast<int>(a_.rows()); }
  std::string name() const override { return "constant"; }
  const Eigen::MatrixXd& matrix() const { return a_; }
  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    (void)x;
    MatX<S> out(a_.rows(), a_.cols());
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
      for (Eigen::Index j = 0; j < a_.cols(); ++j) out(i, j) = S(a_(i, j));
    return out;
  }

 private:
  Eigen::MatrixXd a_;
};

/// Sphere of curvature kappa in stereographic coordinates: a_ij = delta_ij / (1 + kappa |x|^2 / 4)^2.
class SphereMetric final : public RiemannMetricImpl<SphereMetric> {
 public:
  SphereMetric(int m, double kappa);
  int dim() const override { return m_; }
  std::string name() const override { return "sphere"; }
  double curvature() const { return kappa_; }
  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    const S f = 1.0 + (kappa_ / 4.0) * dot<S>(x, x);
    return detail::scaled_identity<S>(m_, S(1.0) / (f * f));
  }

 private:
  int m_;
  double kappa_;
};

/// a_ij = exp(2 x_1) delta_ij.
class ConformalExpMetric final : public RiemannMetricImpl<ConformalExpMetric> {
 public:
  explicit ConformalExpMetric(int n);
  int dim() const override { return n_; }
  std::string name() const override { return "conformal-exp"; }
  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    using std::exp;
    return detail::scaled_identity<S>(n_, exp(x(0) * 2.0));
  }

 private:
  int n_;
};

/// The alpha of Berwald's metric on the unit ball:
/// alpha^2 = ((1 - |x|^2)|y|^2 + <x,y>^2) / (1 - |x|^2)^4.
class BerwaldAlphaMetric final : public RiemannMetricImpl<BerwaldAlphaMetric> {
 public:
  explicit BerwaldAlphaMetric(int n);
  int dim() const override { return n_; }
  std::string name() const override { return "berwald-alpha"; }
  bool in_domain(const Eigen::VectorXd& x) const override { return x.squaredNorm() < 1.0; }
  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    const S q = 1.0 - dot<S>(x, x);
    const S q2 = q * q;
    const S inv = S(1.0) / (q2 * q2);
    MatX<S> a(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a(i, j) = (x(i) * x(j) + (i == j ? q : S(0.0))) * inv;
    return a;
  }

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// built-in 1-forms

/// b_i(x) = A_ij x^j + c_i.
class LinearOneForm final : public OneFormImpl<LinearOneForm> {
 public:
  LinearOneForm(MetricPtr metric, Eigen::MatrixXd a, Eigen::VectorXd c);
  std::string name() const override { return "linear"; }
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& offset() const { return c_; }
  template <class S>
  VecX<S> eval(const VecX<S>& x) const {
    VecX<S> b(c_.size());
    for (Eigen::Index i = 0; i < c_.size(); ++i) {
      S acc(c_(i));
      for (Eigen::Index j = 0; j < a_.cols(); ++j) {
        if (a_(i, j) != 0.0) acc += x(j) * a_(i, j);
      }
      b(i) = acc;
    }
    return b;
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd c_;
};

/// The beta of Berwald's metric: b_i = x_i / (1 - |x|^2)^2.
class BerwaldBetaForm final : public OneFormImpl<BerwaldBetaForm> {
 public:
  explicit BerwaldBetaForm(MetricPtr metric) : OneFormImpl(std::move(metric)) {}
  std::string name() const override { return "berwald-beta"; }
  template <class S>
  VecX<S> eval(const VecX<S>& x) const {
    const S q = 1.0 - dot<S>(x, x);
    const S inv = S(1.0) / (q * q);
    VecX<S> b(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) b(i) = x(i) * inv;
    return b;
  }
};

// ---------------------------------------------------------------------------
// operations

/// Gamma[i](j, k) = 1/2 a^il (d_k a_lj + d_j a_lk - d_l a_jk) from a metric jet of order p;
/// the symbols come back as jets of order p - 1.
template <class T>
std::vector<MatX<Jet<T>>> christoffel_jets(const MatX<Jet<T>>& a) {
  using J = Jet<T>;
  const int n = static_cast<int>(a.rows());
  int order = -1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!a(i, j).is_constant()) order = std::max(order, a(i, j).order());
  if (order < 0) {
    return std::vector<MatX<J>>(static_cast<std::size_t>(n), MatX<J>::Constant(n, n, J(0.0)));
  }
  if (order < 1) throw OrderError("christoffel_jets: metric jet must have order >= 1");
  std::vector<MatX<J>> da(static_cast<std::size_t>(n), MatX<J>(n, n));
  MatX<J> a_low(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a_low(i, j) = truncate(a(i, j), order - 1);
      for (int l = 0; l < n; ++l) da[static_cast<std::size_t>(l)](i, j) = derivative(a(i, j), l);
    }
  }
  // first kind: Gamma_ljk = 1/2 (d_k a_lj + d_j a_lk - d_l a_jk)
  MatX<J> first(n, n * n);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        first(l, j * n + k) = (da[static_cast<std::size_t>(k)](l, j) + da[static_cast<std::size_t>(j)](l, k) -
                               da[static_cast<std::size_t>(l)](j, k)) *
                              0.5;
  const MatX<J> second = solve_spd<J>(a_low, first);
  std::vector<MatX<J>> gamma(static_cast<std::size_t>(n), MatX<J>(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) gamma[static_cast<std::size_t>(i)](j, k) = second(i, j * n + k);
  return gamma;
}

/// Gamma[i](j, k) at x.
std::vector<Eigen::MatrixXd> christoffels(const RiemannMetric& alpha, const Eigen::VectorXd& x);

/// Geodesic spray of alpha from 1/4 a^il {[alpha^2]_{x^k y^l} y^k - [alpha^2]_{x^l}}.
Eigen::VectorXd riemann_spray(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// The same spray as 1/2 Gamma^i_jk y^j y^k.
Eigen::VectorXd christoffel_spray(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Ricci tensor R_jk at x.
Eigen::MatrixXd ricci_tensor(const RiemannMetric& alpha, const Eigen::VectorXd& x);

/// Ric(x, y) = R_jk y^j y^k.
double riemann_ricci(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// b_{i|j} = d_j b_i - Gamma^k_ij b_k, as a matrix indexed (i, j).
Eigen::MatrixXd covariant_derivative(const RiemannMetric& alpha, const OneFormField& beta, const Eigen::VectorXd& x);

/// b_{i|j} as jets of the given order around x (identity seeding in every coordinate direction).
MatX<Jet1> covariant_derivative_jets(const RiemannMetric& alpha, const OneFormField& beta, const Eigen::VectorXd& x,
                                     int order);

/// Everything derived from b_{i|j} that the spray formula contracts.
struct BetaDerivatives {
  Eigen::MatrixXd b_ij;     // b_{i|j}
  Eigen::MatrixXd r;        // r_ij
  Eigen::MatrixXd s;        // s_ij
  Eigen::VectorXd b_up;     // b^i = a^ij b_j
  double r00 = 0.0;         // r_ij y^i y^j
  double r0 = 0.0;          // r_ij b^i y^j
  double s0 = 0.0;          // s_ij b^i y^j
  Eigen::VectorXd s_i0;     // s_ij y^j
  Eigen::VectorXd s_up_0;   // a^ij s_j0
};

/// Splits b_{i|j} into r and s and contracts with y; `a` and `b` are a_ij and b_i at the same x.
BetaDerivatives split_rs(const Eigen::MatrixXd& b_ij, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& y);

/// b = ||beta||_alpha at x.
double beta_norm(const RiemannMetric& alpha, const OneFormField& beta, const Eigen::VectorXd& x);

/// alpha(x, y).
double alpha_norm(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Sampled positive definiteness via a Cholesky factorization.
bool is_positive_definite(const RiemannMetric& alpha, const Eigen::VectorXd& x);

}  // namespace finsq
