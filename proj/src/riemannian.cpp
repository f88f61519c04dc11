#include "finsq/riemannian.hpp"

#include <Eigen/Cholesky>

#include "finsq/differentiation.hpp"

namespace finsq {

namespace {

void require_dim(int n) {
  if (n < 1) throw std::invalid_argument("metric dimension must be positive");
}

std::vector<Jet1> identity_seed(const Eigen::VectorXd& x, int order) {
  return seed(x, Eigen::MatrixXd::Identity(x.size(), x.size()), order);
}

VecX<Jet1> as_vec(const std::vector<Jet1>& v) {
  VecX<Jet1> out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

void require_point(const RiemannMetric& alpha, const Eigen::VectorXd& x) {
  if (x.size() != alpha.dim()) throw std::invalid_argument("point dimension differs from metric dimension");
  if (!alpha.in_domain(x)) throw DomainError("point lies outside the chart of metric '" + alpha.name() + "'");
}

}  // namespace

EuclideanMetric::EuclideanMetric(int n) : EuclideanMetric(n, Eigen::VectorXd::Zero(std::max(n, 0))) {}

EuclideanMetric::EuclideanMetric(int n, Eigen::VectorXd center) : n_(n), center_(std::move(center)) {
  require_dim(n);
  if (center_.size() != n) throw std::invalid_argument("euclidean chart center has the wrong dimension");
}

ConstantMetric::ConstantMetric(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) throw std::invalid_argument("constant metric must be square");
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + a_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("constant metric must be symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(a_).info() != Eigen::Success) {
    throw std::invalid_argument("constant metric must be positive definite");
  }
}

SphereMetric::SphereMetric(int m, double kappa) : m_(m), kappa_(kappa) {
  require_dim(m);
  if (!(kappa > 0.0)) throw std::invalid_argument("sphere curvature must be positive");
}

ConformalExpMetric::ConformalExpMetric(int n) : n_(n) { require_dim(n); }

BerwaldAlphaMetric::BerwaldAlphaMetric(int n) : n_(n) { require_dim(n); }

LinearOneForm::LinearOneForm(MetricPtr metric, Eigen::MatrixXd a, Eigen::VectorXd c)
    : OneFormImpl(std::move(metric)), a_(std::move(a)), c_(std::move(c)) {
  const int n = dim();
  if (a_.rows() != n || a_.cols() != n || c_.size() != n) {
    throw std::invalid_argument("linear one-form: shape differs from metric dimension");
  }
}

std::vector<Eigen::MatrixXd> christoffels(const RiemannMetric& alpha, const Eigen::VectorXd& x) {
  require_point(alpha, x);
  const auto a = alpha.components(as_vec(identity_seed(x, 1)));
  const auto gamma = christoffel_jets<double>(a);
  std::vector<Eigen::MatrixXd> out;
  for (const auto& g : gamma) out.push_back(g.unaryExpr([](const Jet1& j) { return j.value(); }));
  return out;
}

Eigen::VectorXd riemann_spray(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  require_point(alpha, x);
  const int n = alpha.dim();
  const auto s = seed_xy(x, y, {1, 1});
  const Jet2 alpha2 = bilinear<Jet2>(alpha.components(s.x), s.y, s.y);
  const Eigen::MatrixXd a = alpha.components(Eigen::VectorXd(x));

  std::vector<int> zero(static_cast<std::size_t>(n), 0);
  auto unit = [&](int k) {
    auto e = zero;
    e[static_cast<std::size_t>(k)] = 1;
    return e;
  };
  Eigen::VectorXd rhs(n);
  for (int l = 0; l < n; ++l) {
    double mixed = 0.0;
    for (int k = 0; k < n; ++k) mixed += partial_xy(alpha2, unit(k), unit(l)) * y(k);
    rhs(l) = mixed - partial_xy(alpha2, unit(l), zero);
  }
  return 0.25 * a.llt().solve(rhs);
}

Eigen::VectorXd christoffel_spray(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto gamma = christoffels(alpha, x);
  Eigen::VectorXd g(alpha.dim());
  for (int i = 0; i < alpha.dim(); ++i) g(i) = 0.5 * y.dot(gamma[static_cast<std::size_t>(i)] * y);
  return g;
}

Eigen::MatrixXd ricci_tensor(const RiemannMetric& alpha, const Eigen::VectorXd& x) {
  require_point(alpha, x);
  const int n = alpha.dim();
  const auto a = alpha.components(as_vec(identity_seed(x, 2)));
  const auto gamma = christoffel_jets<double>(a);  // order-1 jets
  auto G = [&](int i, int j, int k) -> const Jet1& { return gamma[static_cast<std::size_t>(i)](j, k); };
  auto dG = [&](int m, int i, int j, int k) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(m)] = 1;
    return partial(G(i, j, k), e);
  };
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double r = 0.0;
      for (int i = 0; i < n; ++i) {
        r += dG(i, i, j, k) - dG(k, i, i, j);
        for (int p = 0; p < n; ++p) {
          r += G(i, i, p).value() * G(p, j, k).value() - G(i, k, p).value() * G(p, i, j).value();
        }
      }
      ric(j, k) = r;
    }
  }
  return ric;
}

double riemann_ricci(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return y.dot(ricci_tensor(alpha, x) * y);
}

MatX<Jet1> covariant_derivative_jets(const RiemannMetric& alpha, const OneFormField& beta, const Eigen::VectorXd& x,
                                     int order) {
  require_point(alpha, x);
  if (beta.dim() != alpha.dim()) throw std::invalid_argument("one-form dimension differs from metric dimension");
  const int n = alpha.dim();
  const auto xs = as_vec(identity_seed(x, order + 1));
  const auto a = alpha.components(xs);
  const auto b = beta.components(xs);
  const auto gamma = christoffel_jets<double>(a);
  MatX<Jet1> out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet1 v = derivative(b(i), j);
      for (int k = 0; k < n; ++k) v -= gamma[static_cast<std::size_t>(k)](i, j) * truncate(b(k), order);
      out(i, j) = v;
    }
  }
  return out;
}

Eigen::MatrixXd covariant_derivative(const RiemannMetric& alpha, const OneFormField& beta, const Eigen::VectorXd& x) {
  const auto jets = covariant_derivative_jets(alpha, beta, x, 0);
  return jets.unaryExpr([](const Jet1& j) { return j.value(); });
}

BetaDerivatives split_rs(const Eigen::MatrixXd& b_ij, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& y) {
  BetaDerivatives d;
  d.b_ij = b_ij;
  d.r = 0.5 * (b_ij + b_ij.transpose());
  d.s = 0.5 * (b_ij - b_ij.transpose());
  const auto llt = a.llt();
  d.b_up = llt.solve(b);
  d.r00 = y.dot(d.r * y);
  d.r0 = d.b_up.dot(d.r * y);
  d.s0 = d.b_up.dot(d.s * y);
  d.s_i0 = d.s * y;
  d.s_up_0 = llt.solve(d.s_i0);
  return d;
}

double beta_norm(const RiemannMetric& alpha, const OneFormField& beta, const Eigen::VectorXd& x) {
  require_point(alpha, x);
  const Eigen::MatrixXd a = alpha.components(Eigen::VectorXd(x));
  const Eigen::VectorXd b = beta.components(Eigen::VectorXd(x));
  return std::sqrt(std::max(0.0, dual_norm2<double>(a, b)));
}

double alpha_norm(const RiemannMetric& alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd a = alpha.components(Eigen::VectorXd(x));
  return std::sqrt(y.dot(a * y));
}

bool is_positive_definite(const RiemannMetric& alpha, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd a = alpha.components(Eigen::VectorXd(x));
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) return false;
  return Eigen::LLT<Eigen::MatrixXd>(a).info() == Eigen::Success;
}

}  // namespace finsq
