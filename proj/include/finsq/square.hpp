#pragma once

// Square metrics F = (alpha + beta)^2 / alpha: the profile library, the
// tilde and bar deformations with their inverses, and residual checkers for
// the Einstein conditions.

#include <string>
#include <utility>
#include <vector>

#include "finsq/finsler.hpp"
#include "finsq/sampling.hpp"

namespace finsq {

// ---------------------------------------------------------------------------
// profiles

/// square, square-tilde, square-bar, randers-nav, riemannian, randers.
PhiPtr phi_library(const std::string& name);
std::vector<std::string> phi_names();

/// phi_22 - 2 (phi_1 - s phi_12) for a general profile.
double pde_residual(const PhiFunction& phi, double b2, double s);

// ---------------------------------------------------------------------------
// pairs and deformations

struct SquarePair {
  MetricPtr alpha;
  OneFormPtr beta;
};

/// alpha~ = (1 - b^2) alpha, beta~ = sqrt(1 - b^2) beta.
struct DeformedPairTilde {
  MetricPtr alpha;
  OneFormPtr beta;
  double b(const Eigen::VectorXd& x) const { return beta_norm(*alpha, *beta, x); }
};

/// a-_ij = (1 - b^2)^3 (a_ij - b_i b_j), beta- = (1 - b^2)^2 beta.
struct DeformedPairBar {
  MetricPtr alpha;
  OneFormPtr beta;
  double b(const Eigen::VectorXd& x) const { return beta_norm(*alpha, *beta, x); }
};

namespace detail {

template <class S>
S norm2(const RiemannMetric& alpha, const OneFormField& beta, const VecX<S>& x) {
  return dual_norm2<S>(alpha.components(x), beta.components(x));
}

template <class S>
MatX<S> scaled(const MatX<S>& a, const S& w) {
  MatX<S> out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * w;
  return out;
}

template <class S>
VecX<S> scaled(const VecX<S>& b, const S& w) {
  VecX<S> out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) out(i) = b(i) * w;
  return out;
}

/// Shared state of a metric or form built from a parent pair.
class PairWrapper {
 public:
  PairWrapper(MetricPtr alpha, OneFormPtr beta);
  const MetricPtr& parent_alpha() const { return alpha_; }
  const OneFormPtr& parent_beta() const { return beta_; }

 protected:
  MetricPtr alpha_;
  OneFormPtr beta_;
};

}  // namespace detail

/// Which way a wrapper maps a pair.
enum class Deformation { tilde, tilde_inverse, bar, bar_inverse };

/// The Riemannian metric of a deformed (or undeformed) pair, evaluated from the parent pair.
class DeformedMetric final : public RiemannMetricImpl<DeformedMetric>, public detail::PairWrapper {
 public:
  DeformedMetric(MetricPtr alpha, OneFormPtr beta, Deformation kind);
  int dim() const override { return alpha_->dim(); }
  std::string name() const override;
  bool in_domain(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd chart_center() const override { return alpha_->chart_center(); }
  Deformation kind() const { return kind_; }

  template <class S>
  MatX<S> eval(const VecX<S>& x) const {
    const MatX<S> a = alpha_->components(x);
    const VecX<S> b = beta_->components(x);
    const S b2 = dual_norm2<S>(a, b);
    switch (kind_) {
      case Deformation::tilde: {
        const S q = 1.0 - b2;
        return detail::scaled<S>(a, q * q);
      }
      case Deformation::tilde_inverse: {
        const S q = 1.0 + b2;
        return detail::scaled<S>(a, q * q);
      }
      case Deformation::bar: {
        const S q = 1.0 - b2;
        MatX<S> out(a.rows(), a.cols());
        const S w = q * q * q;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
          for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = (a(i, j) - b(i) * b(j)) * w;
        return out;
      }
      case Deformation::bar_inverse: {
        const S q = 1.0 - b2;
        const S q2 = q * q;
        const S w = S(1.0) / (q2 * q2);
        MatX<S> out(a.rows(), a.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
          for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = (a(i, j) * q + b(i) * b(j)) * w;
        return out;
      }
    }
    throw std::logic_error("DeformedMetric: unknown deformation");
  }

 private:
  Deformation kind_;
};

/// The 1-form of a deformed pair; its parent metric is the matching DeformedMetric.
class DeformedOneForm final : public OneFormImpl<DeformedOneForm>, public detail::PairWrapper {
 public:
  DeformedOneForm(MetricPtr deformed_metric, MetricPtr alpha, OneFormPtr beta, Deformation kind);
  std::string name() const override;

  template <class S>
  VecX<S> eval(const VecX<S>& x) const {
    using std::sqrt;
    const S b2 = detail::norm2<S>(*alpha_, *beta_, x);
    const VecX<S> b = beta_->components(x);
    switch (kind_) {
      case Deformation::tilde:
        return detail::scaled<S>(b, sqrt(1.0 - b2));
      case Deformation::tilde_inverse:
        return detail::scaled<S>(b, sqrt(1.0 + b2));
      case Deformation::bar: {
        const S q = 1.0 - b2;
        return detail::scaled<S>(b, q * q);
      }
      case Deformation::bar_inverse: {
        const S q = 1.0 - b2;
        return detail::scaled<S>(b, S(1.0) / (q * q));
      }
    }
    throw std::logic_error("DeformedOneForm: unknown deformation");
  }

 private:
  Deformation kind_;
};

DeformedPairTilde deform_to_tilde(const SquarePair& pair);
SquarePair tilde_to_original(const DeformedPairTilde& pair);
DeformedPairBar deform_to_bar(const SquarePair& pair);
SquarePair bar_to_original(const DeformedPairBar& pair);

/// F from (alpha, beta), (alpha~, beta~) and (alpha-, beta-) respectively.
ABMetricPtr square_metric(const SquarePair& pair, std::string name = "square");
ABMetricPtr square_metric(const DeformedPairTilde& pair, std::string name = "square-tilde");
ABMetricPtr square_metric(const DeformedPairBar& pair, std::string name = "square-bar");

// ---------------------------------------------------------------------------
// residual bookkeeping

struct ResidualStats {
  std::size_t count = 0;
  double max = 0.0;
  double sum = 0.0;

  /// Non-finite values count as infinite.
  void add(double v);
  void merge(const ResidualStats& other);
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

struct SubCheck {
  std::string name;
  ResidualStats stats;
  double tolerance = 0.0;
  bool pass() const { return stats.count > 0 && stats.max <= tolerance; }
};

struct Certificate {
  std::string name;
  std::size_t samples_used = 0;
  std::size_t samples_skipped = 0;
  std::vector<SubCheck> checks;
  std::vector<std::pair<std::string, double>> fitted;
  std::vector<double> tau;  // per used sample, when the checker extracts tau
  std::string reason;       // set when the check could not run

  bool pass() const;
  double max_residual() const;
  double mean_residual() const;
  const SubCheck* find(const std::string& check) const;
  double constant(const std::string& key) const;
};

using EinsteinCertificate = Certificate;

// ---------------------------------------------------------------------------
// checkers; tol applies to curvature-type residuals, alg_tol to algebraic identities

/// Fit of c in b_i|j = c (1 - b^2)((1 + 2 b^2) a_ij - 3 b_i b_j),
/// the alpha-Ricci identity, and Ricci flatness of F.
EinsteinCertificate check_theorem_1_1(const SquarePair& pair, const SampleSet& samples, double tol = 1e-6);

/// tau from the trace of b_i|j; the tau form of the Einstein equations; tau / (1 - b^2) constant.
EinsteinCertificate check_theorem_2_1(const SquarePair& pair, const SampleSet& samples, double tol = 1e-6);

/// max |s_ij| and |s^k_0 s_k0|.
Certificate check_closed(const SquarePair& pair, const SampleSet& samples, double tol = 1e-10);

/// Ric~ = -(n-1) c^2 alpha~^2 and b~_i|j = c sqrt(1 + b~^2) a~_ij.
Certificate check_tilde_conditions(const DeformedPairTilde& pair, const SampleSet& samples, double tol = 1e-6);

/// Ric- = 0 and b-_i|j = c a-_ij.
Certificate check_bar_conditions(const DeformedPairBar& pair, const SampleSet& samples, double tol = 1e-6);

/// Identities of the deformations: b~ and b- against b, round trips, and F three ways.
Certificate check_deformations(const SquarePair& pair, const SampleSet& samples, double alg_tol = 1e-10,
                               double f_tol = 1e-9);

/// The profile PDE on an n x n grid with b^2 <= max_b2, |s| <= b, for every general library profile.
Certificate check_pde(double tol = 1e-10, int grid = 20, double max_b2 = 0.8);

/// Douglas tensor of F, relative to F-scale.
Certificate check_douglas(const FinslerMetric& metric, const SampleSet& samples, double tol = 1e-6);

/// Spray identity of a deformation; throws PreconditionError when the conformal shape of b_i|j fails at tol.
double spray_deformation_residual(const SquarePair& pair, Deformation which, const SampleSet& samples,
                                  double tol = 1e-6);
Certificate check_spray_deformation(const SquarePair& pair, const SampleSet& samples, double tol = 1e-7,
                                    double precondition_tol = 1e-6);

/// tau = a^ij b_i|j / (n (1 + 2 b^2) - 3 b^2).
double extract_tau(const SquarePair& pair, const Eigen::VectorXd& x);

}  // namespace finsq
