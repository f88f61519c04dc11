#pragma once

// Finsler metrics given by F^2(x, y) on a chart, and everything computed
// from the geodesic spray: Berwald's Riemann curvature, Ricci curvature,
// flag curvature and the Douglas tensor.
//
// Sprays are obtained from a nested jet of F^2: the jet of G^i is built
// from the jets of F^2 and its partials, so every derivative that Berwald's
// formula needs is exact. A Richardson finite-difference backend over the
// exactly evaluated spray is available for cross-checking.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "finsq/differentiation.hpp"
#include "finsq/phi.hpp"
#include "finsq/riemannian.hpp"

namespace finsq {

class FinslerMetric {
 public:
  virtual ~FinslerMetric() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual bool in_domain(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd chart_center() const { return Eigen::VectorXd::Zero(dim()); }
  /// Metric whose unit sphere samplers draw y from; null means normalize by F.
  virtual MetricPtr reference_metric() const { return nullptr; }

  virtual double f2(const VecX<double>& x, const VecX<double>& y) const = 0;
  virtual Jet1 f2(const VecX<Jet1>& x, const VecX<Jet1>& y) const = 0;
  virtual Jet2 f2(const VecX<Jet2>& x, const VecX<Jet2>& y) const = 0;
};

using FinslerPtr = std::shared_ptr<const FinslerMetric>;

template <class Derived>
class FinslerMetricImpl : public FinslerMetric {
 public:
  double f2(const VecX<double>& x, const VecX<double>& y) const final { return self().template eval_f2<double>(x, y); }
  Jet1 f2(const VecX<Jet1>& x, const VecX<Jet1>& y) const final { return self().template eval_f2<Jet1>(x, y); }
  Jet2 f2(const VecX<Jet2>& x, const VecX<Jet2>& y) const final { return self().template eval_f2<Jet2>(x, y); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// F = alpha * phi(b^2, beta / alpha).
class GeneralABMetric final : public FinslerMetricImpl<GeneralABMetric> {
 public:
  GeneralABMetric(MetricPtr alpha, OneFormPtr beta, PhiPtr phi, std::string name = {});

  int dim() const override { return alpha_->dim(); }
  std::string name() const override { return name_; }
  bool in_domain(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd chart_center() const override { return alpha_->chart_center(); }
  MetricPtr reference_metric() const override { return alpha_; }

  const MetricPtr& alpha() const noexcept { return alpha_; }
  const OneFormPtr& beta() const noexcept { return beta_; }
  const PhiPtr& phi() const noexcept { return phi_; }

  template <class S>
  S eval_f2(const VecX<S>& x, const VecX<S>& y) const {
    using std::sqrt;
    const MatX<S> a = alpha_->components(x);
    const VecX<S> b = beta_->components(x);
    const S alpha2 = bilinear<S>(a, y, y);
    const S alpha_norm = sqrt(alpha2);
    const S s = dot<S>(b, y) / alpha_norm;
    const S b2 = phi_->kind() == PhiKind::general ? dual_norm2<S>(a, b) : S(0.0);
    const S f = alpha_norm * phi_->value(b2, s);
    return f * f;
  }

 private:
  MetricPtr alpha_;
  OneFormPtr beta_;
  PhiPtr phi_;
  std::string name_;
};

using ABMetricPtr = std::shared_ptr<const GeneralABMetric>;

enum class DerivativeBackend { jet, finite_difference };

struct CurvatureOptions {
  DerivativeBackend backend = DerivativeBackend::jet;
  double fd_step = 1e-3;
};

struct FundamentalTensor {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
};

/// Everything Berwald's formula produces at one (x, y).
struct CurvatureData {
  double f2 = 0.0;
  Eigen::VectorXd spray;     // G^i
  Eigen::MatrixXd riemann;   // R^i_k
  double ricci = 0.0;        // R^m_m
  Eigen::MatrixXd g;         // g_ij
};

/// Totally symmetric in (j, k, l); stored as D[((j * n + i) * n + k) * n + l].
class DouglasTensor {
 public:
  explicit DouglasTensor(int n) : n_(n), d_(static_cast<std::size_t>(n * n * n * n), 0.0) {}
  int dim() const noexcept { return n_; }
  double& operator()(int j, int i, int k, int l) { return d_[index(j, i, k, l)]; }
  double operator()(int j, int i, int k, int l) const { return d_[index(j, i, k, l)]; }
  double max_abs() const;

 private:
  std::size_t index(int j, int i, int k, int l) const {
    return static_cast<std::size_t>(((j * n_ + i) * n_ + k) * n_ + l);
  }
  int n_;
  std::vector<double> d_;
};

double f_value(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// g_ij = 1/2 [F^2]_{y^i y^j} and its inverse; throws SingularError when not positive definite.
FundamentalTensor fundamental_tensor(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Jets of G^i with truncation orders (x_order, y_order), from a jet of F^2 two orders deeper in y.
std::vector<Jet2> spray_jets(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             int x_order, int y_order);

/// G^i = 1/4 g^il {[F^2]_{x^k y^l} y^k - [F^2]_{x^l}}.
Eigen::VectorXd spray_generic(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Closed form for plain profiles:
/// G^i = aG^i + alpha Q s^i_0 + (-2 alpha Q s_0 + r_00)(Theta alpha^-1 y^i + Psi b^i).
Eigen::VectorXd spray_ab_closed(const GeneralABMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Spray partials needed by Berwald's formula, by the selected backend.
PartialTable spray_partials(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const CurvatureOptions& options = {});

CurvatureData curvature(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const CurvatureOptions& options = {});

/// R^i_k = 2 dG^i/dx^k - y^m d2G^i/dx^m dy^k + 2 G^m d2G^i/dy^m dy^k - dG^i/dy^m dG^m/dy^k.
Eigen::MatrixXd berwald_riemann(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                const CurvatureOptions& options = {});

double ricci(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
             const CurvatureOptions& options = {});

/// K(y, u) = g(R_y u, u) / (F^2 g(u, u) - g(y, u)^2).
double flag_curvature(const CurvatureData& data, const Eigen::VectorXd& y, const Eigen::VectorXd& u);
double flag_curvature(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& u, const CurvatureOptions& options = {});

/// max |R^i_k - K (delta^i_k F^2 - y^i g_kj y^j)| / (F^2 (1 + max |R|)).
double cfc_residual(const CurvatureData& data, const Eigen::VectorXd& y, double k);
double cfc_residual(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double k,
                    const CurvatureOptions& options = {});

/// |Ric - (n - 1) c(x) F^2| / F^2.
double einstein_residual(const CurvatureData& data, int n, double einstein_scale);
double einstein_residual(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const std::function<double(const Eigen::VectorXd&)>& einstein_scale,
                         const CurvatureOptions& options = {});

/// D_j^i_kl = (G^i - 1/(n+1) (dG^m/dy^m) y^i)_{y^j y^k y^l}.
DouglasTensor douglas_tensor(const FinslerMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace finsq
