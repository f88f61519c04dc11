#include "finsq/finsler.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

namespace finsq {

namespace {

void require_sample(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != metric.dim() || y.size() != metric.dim()) {
    throw std::invalid_argument("sample dimension differs from metric dimension");
  }
  if (y.squaredNorm() == 0.0) throw DomainError("direction y must be nonzero");
  if (!metric.in_domain(x)) throw DomainError("point lies outside the domain of metric '" + metric.name() + "'");
}

Eigen::MatrixXd riemann_from_partials(const PartialTable& t, const Eigen::VectorXd& y) {
  const auto n = t.value.size();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& dxdy = t.dxdy[static_cast<std::size_t>(i)];
    const auto& dydy = t.dydy[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      double v = 2.0 * t.dx(i, k);
      for (Eigen::Index m = 0; m < n; ++m) {
        v += -dxdy(m, k) * y(m) + 2.0 * t.value(m) * dydy(m, k) - t.dy(i, m) * t.dy(m, k);
      }
      r(i, k) = v;
    }
  }
  return r;
}

PartialTable finite_difference_partials(const FinslerMetric& metric, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y, double h) {
  const auto n = x.size();
  auto G = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& yy) { return spray_generic(metric, xx, yy); };
  auto shift = [](const Eigen::VectorXd& v, Eigen::Index k, double d) {
    Eigen::VectorXd w = v;
    w(k) += d;
    return w;
  };
  auto richardson = [](const auto& estimate, double step) {
    return ((4.0 * estimate(step / 2.0) - estimate(step)) / 3.0).eval();
  };

  PartialTable t;
  t.value = G(x, y);
  t.dx.resize(n, n);
  t.dy.resize(n, n);
  t.dxdy.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(n, n));
  t.dydy.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(n, n));

  for (Eigen::Index k = 0; k < n; ++k) {
    t.dx.col(k) = richardson(
        [&](double s) -> Eigen::VectorXd { return (G(shift(x, k, s), y) - G(shift(x, k, -s), y)) / (2.0 * s); }, h);
    t.dy.col(k) = richardson(
        [&](double s) -> Eigen::VectorXd { return (G(x, shift(y, k, s)) - G(x, shift(y, k, -s))) / (2.0 * s); }, h);
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::VectorXd xy = richardson(
          [&](double s) -> Eigen::VectorXd {
            return (G(shift(x, m, s), shift(y, k, s)) - G(shift(x, m, s), shift(y, k, -s)) -
                    G(shift(x, m, -s), shift(y, k, s)) + G(shift(x, m, -s), shift(y, k, -s))) /
                   (4.0 * s * s);
          },
          h);
      Eigen::VectorXd yy;
      if (m == k) {
        yy = richardson(
            [&](double s) -> Eigen::VectorXd {
              return (G(x, shift(y, k, s)) - 2.0 * t.value + G(x, shift(y, k, -s))) / (s * s);
            },
            h);
      } else {
        yy = richardson(
            [&](double s) -> Eigen::VectorXd {
              return (G(x, shift(shift(y, m, s), k, s)) - G(x, shift(shift(y, m, s), k, -s)) -
                      G(x, shift(shift(y, m, -s), k, s)) + G(x, shift(shift(y, m, -s), k, -s))) /
                     (4.0 * s * s);
            },
            h);
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        t.dxdy[static_cast<std::size_t>(i)](m, k) = xy(i);
        t.dydy[static_cast<std::size_t>(i)](m, k) = yy(i);
      }
    }
  }
  return t;
}

}  // namespace

double DouglasTensor::max_abs() const {
  double m = 0.0;
  for (double v : d_) m = std::max(m, std::abs(v));
  return m;
}

GeneralABMetric::GeneralABMetric(MetricPtr alpha, OneFormPtr beta, PhiPtr phi, std::string name)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), phi_(std::move(phi)), name_(std::move(name)) {
  if (!alpha_ || !beta_ || !phi_) throw std::invalid_argument("(alpha, beta)-metric: null component");
  if (beta_->dim() != alpha_->dim()) throw std::invalid_argument("(alpha, beta)-metric: dimension mismatch");
  if (name_.empty()) name_ = phi_->name();
}

bool GeneralABMetric::in_domain(const Eigen::VectorXd& x) const {
  if (x.size() != dim() || !alpha_->in_domain(x)) return false;
  const Eigen::MatrixXd a = alpha_->components(x);
  const Eigen::VectorXd b = beta_->components(x);
  if (!a.allFinite() || !b.allFinite()) return false;
  const double b2 = dual_norm2<double>(a, b);
  return std::isfinite(b2) && phi_->in_domain(b2, 0.0);
}

double f_value(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  require_sample(metric, x, y);
  if (const auto* ab = dynamic_cast<const GeneralABMetric*>(&metric)) {
    const Eigen::MatrixXd a = ab->alpha()->components(x);
    const Eigen::VectorXd b = ab->beta()->components(x);
    const double alpha = std::sqrt(y.dot(a * y));
    if (!(alpha > 0.0)) throw DomainError("f_value: alpha vanishes at y");
    const double b2 = dual_norm2<double>(a, b);
    const double s = b.dot(y) / alpha;
    if (!ab->phi()->in_domain(b2, s)) {
      throw DomainError("f_value: (b^2, s) = (" + std::to_string(b2) + ", " + std::to_string(s) +
                        ") outside the domain of phi '" + ab->phi()->name() + "'");
    }
  }
  const double f2 = metric.f2(x, y);
  if (!std::isfinite(f2) || f2 < 0.0) throw DomainError("f_value: F^2 is not a finite non-negative number");
  return std::sqrt(f2);
}

FundamentalTensor fundamental_tensor(const FinslerMetric& metric, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y) {
  require_sample(metric, x, y);
  const int n = metric.dim();
  const auto s = seed_xy(x, y, {0, 2});
  const Jet2 f2 = metric.f2(s.x, s.y);
  const std::vector<int> zero(static_cast<std::size_t>(n), 0);
  FundamentalTensor t;
  t.g.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto e = zero;
      e[static_cast<std::size_t>(i)] += 1;
      e[static_cast<std::size_t>(j)] += 1;
      t.g(i, j) = 0.5 * partial_xy(f2, zero, e);
    }
  }
  if (!t.g.allFinite()) throw DomainError("fundamental_tensor: F^2 is not finite at the sample");
  const Eigen::LLT<Eigen::MatrixXd> llt(t.g);
  if (llt.info() != Eigen::Success) throw SingularError("fundamental_tensor: g_ij is not positive definite");
  t.g_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return t;
}

std::vector<Jet2> spray_jets(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             int x_order, int y_order) {
  require_sample(metric, x, y);
  const int n = metric.dim();
  const auto s = seed_xy(x, y, {x_order + 1, y_order + 2});
  const Jet2 f2 = metric.f2(s.x, s.y);
  if (!all_finite(f2)) throw DomainError("spray: F^2 is not finite at the sample");

  std::vector<Jet2> f2_y;
  for (int l = 0; l < n; ++l) f2_y.push_back(dy(f2, l));

  MatX<Jet2> g(n, n);
  VecX<Jet2> rhs(n);
  VecX<Jet2> yt(n);
  for (int k = 0; k < n; ++k) yt(k) = truncate_xy(s.y(k), x_order, y_order);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) g(i, l) = truncate_xy(dy(f2_y[static_cast<std::size_t>(i)], l), x_order, y_order) * 0.5;
    Jet2 r = -truncate_xy(dx(f2, l), x_order, y_order);
    for (int k = 0; k < n; ++k) r += truncate_xy(dx(f2_y[static_cast<std::size_t>(l)], k), x_order, y_order) * yt(k);
    rhs(l) = r;
  }
  const VecX<Jet2> G = solve_spd<Jet2>(g, rhs);
  std::vector<Jet2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(G(i) * 0.25);
  return out;
}

Eigen::VectorXd spray_generic(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto jets = spray_jets(metric, x, y, 0, 0);
  Eigen::VectorXd g(metric.dim());
  for (int i = 0; i < metric.dim(); ++i) g(i) = scalar_value(jets[static_cast<std::size_t>(i)]);
  if (!g.allFinite()) throw DomainError("spray: non-finite spray coefficient");
  return g;
}

Eigen::VectorXd spray_ab_closed(const GeneralABMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  require_sample(metric, x, y);
  if (metric.phi()->kind() != PhiKind::plain) {
    throw std::invalid_argument("spray_ab_closed: needs a plain profile phi(s)");
  }
  const auto& alpha = *metric.alpha();
  const auto& beta = *metric.beta();
  const Eigen::MatrixXd a = alpha.components(x);
  const Eigen::VectorXd b = beta.components(x);
  const auto d = split_rs(covariant_derivative(alpha, beta, x), a, b, y);

  const double al = std::sqrt(y.dot(a * y));
  const double s = b.dot(y) / al;
  const double b2 = b.dot(d.b_up);
  const auto p = phi_partials(*metric.phi(), b2, s);
  const double phi = p.phi;
  const double dphi = p.d2;
  const double ddphi = p.d22;
  const double den1 = phi - s * dphi;
  const double den2 = den1 + (b2 - s * s) * ddphi;
  // regularity: phi > 0, phi - s phi' > 0, phi - s phi' + (b^2 - s^2) phi'' > 0
  if (!(phi > 1e-12) || !(den1 > 1e-12) || !(den2 > 1e-12)) {
    throw DomainError("spray_ab_closed: profile not regular at this sample");
  }
  const double Q = dphi / den1;
  const double Theta = (den1 * dphi - s * phi * ddphi) / (2.0 * phi * den2);
  const double Psi = ddphi / (2.0 * den2);
  const double common = -2.0 * al * Q * d.s0 + d.r00;
  return riemann_spray(alpha, x, y) + al * Q * d.s_up_0 + common * (Theta / al * y + Psi * d.b_up);
}

PartialTable spray_partials(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const CurvatureOptions& options) {
  if (options.backend == DerivativeBackend::finite_difference) {
    return finite_difference_partials(metric, x, y, options.fd_step);
  }
  const auto jets = spray_jets(metric, x, y, 1, 2);
  return tabulate(jets);
}

CurvatureData curvature(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const CurvatureOptions& options) {
  const auto t = spray_partials(metric, x, y, options);
  CurvatureData d;
  d.spray = t.value;
  d.riemann = riemann_from_partials(t, y);
  d.ricci = d.riemann.trace();
  d.g = fundamental_tensor(metric, x, y).g;
  d.f2 = y.dot(d.g * y);
  return d;
}

Eigen::MatrixXd berwald_riemann(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                const CurvatureOptions& options) {
  return riemann_from_partials(spray_partials(metric, x, y, options), y);
}

double ricci(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
             const CurvatureOptions& options) {
  return berwald_riemann(metric, x, y, options).trace();
}

double flag_curvature(const CurvatureData& data, const Eigen::VectorXd& y, const Eigen::VectorXd& u) {
  const double guu = u.dot(data.g * u);
  const double gyu = y.dot(data.g * u);
  const double denom = data.f2 * guu - gyu * gyu;
  if (!(denom > 1e-12 * std::max(1.0, data.f2 * guu))) {
    throw DomainError("flag_curvature: degenerate flag (u parallel to y)");
  }
  return u.dot(data.g * (data.riemann * u)) / denom;
}

double flag_curvature(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& u, const CurvatureOptions& options) {
  return flag_curvature(curvature(metric, x, y, options), y, u);
}

double cfc_residual(const CurvatureData& data, const Eigen::VectorXd& y, double k) {
  const auto n = y.size();
  const Eigen::VectorXd gy = data.g * y;
  const Eigen::MatrixXd expected = k * (data.f2 * Eigen::MatrixXd::Identity(n, n) - y * gy.transpose());
  const double scale = data.f2 * (1.0 + data.riemann.cwiseAbs().maxCoeff());
  return (data.riemann - expected).cwiseAbs().maxCoeff() / scale;
}

double cfc_residual(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double k,
                    const CurvatureOptions& options) {
  return cfc_residual(curvature(metric, x, y, options), y, k);
}

double einstein_residual(const CurvatureData& data, int n, double einstein_scale) {
  return std::abs(data.ricci - (n - 1) * einstein_scale * data.f2) / data.f2;
}

double einstein_residual(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const std::function<double(const Eigen::VectorXd&)>& einstein_scale,
                         const CurvatureOptions& options) {
  return einstein_residual(curvature(metric, x, y, options), metric.dim(), einstein_scale(x));
}

DouglasTensor douglas_tensor(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = metric.dim();
  const auto G = spray_jets(metric, x, y, 0, 4);
  Jet2 trace(0.0);
  for (int m = 0; m < n; ++m) trace += dy(G[static_cast<std::size_t>(m)], m);
  const auto ys = seed_xy(x, y, {0, 3});
  const std::vector<int> zero(static_cast<std::size_t>(n), 0);
  DouglasTensor d(n);
  for (int i = 0; i < n; ++i) {
    const Jet2 h = truncate_xy(G[static_cast<std::size_t>(i)], 0, 3) - trace * ys.y(i) * (1.0 / (n + 1));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          auto e = zero;
          e[static_cast<std::size_t>(j)] += 1;
          e[static_cast<std::size_t>(k)] += 1;
          e[static_cast<std::size_t>(l)] += 1;
          d(j, i, k, l) = partial_xy(h, zero, e);
        }
  }
  return d;
}

}  // namespace finsq
