#include <random>

#include "doctest.h"
#include "finsq/riemannian.hpp"

using namespace finsq;

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Christoffel symbols of e^{2f} delta from the gradient of f.
std::vector<Eigen::MatrixXd> conformal_christoffels(const Eigen::VectorXd& df) {
  const auto n = df.size();
  std::vector<Eigen::MatrixXd> g(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        g[static_cast<std::size_t>(i)](j, k) =
            (i == j ? df(k) : 0.0) + (i == k ? df(j) : 0.0) - (j == k ? df(i) : 0.0);
  return g;
}

}  // namespace

TEST_CASE("sphere christoffels match the conformal formula") {
  std::mt19937_64 rng(7);
  for (double kappa : {1.0, 0.3, 2.5}) {
    const SphereMetric sphere(3, kappa);
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd x = random_vector(rng, 3, 0.8);
      const Eigen::VectorXd df = -(kappa / 2.0) * x / (1.0 + kappa * x.squaredNorm() / 4.0);
      const auto expected = conformal_christoffels(df);
      const auto got = christoffels(sphere, x);
      for (int i = 0; i < 3; ++i) CHECK((got[i] - expected[i]).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("sphere ricci is (m - 1) kappa alpha^2") {
  std::mt19937_64 rng(11);
  for (int m : {2, 3, 4}) {
    for (double kappa : {1.0, 0.49}) {
      const SphereMetric sphere(m, kappa);
      for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd x = random_vector(rng, m, 0.7);
        const Eigen::VectorXd y = random_vector(rng, m, 1.0);
        const double a2 = y.dot(sphere.components(x) * y);
        CHECK(riemann_ricci(sphere, x, y) == doctest::Approx((m - 1) * kappa * a2).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("conformal-exp ricci") {
  // e^{2 x_0} delta: Ric = (n - 2)(dx_0^2 - delta)
  std::mt19937_64 rng(3);
  for (int n : {2, 3, 4}) {
    const ConformalExpMetric metric(n);
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd x = random_vector(rng, n, 0.5);
      const Eigen::VectorXd y = random_vector(rng, n, 1.0);
      const double expected = (n - 2) * (y(0) * y(0) - y.squaredNorm());
      CHECK(riemann_ricci(metric, x, y) == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("euclidean is flat") {
  const EuclideanMetric e(3);
  const Eigen::Vector3d x(0.1, 0.2, 0.3), y(1.0, -2.0, 0.5);
  CHECK(ricci_tensor(e, x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(riemann_spray(e, x, y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the two spray formulas agree") {
  std::mt19937_64 rng(5);
  const std::vector<MetricPtr> metrics{std::make_shared<SphereMetric>(3, 1.0), std::make_shared<ConformalExpMetric>(3),
                                       std::make_shared<BerwaldAlphaMetric>(3)};
  for (const auto& m : metrics) {
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd x = random_vector(rng, 3, 0.5);
      const Eigen::VectorXd y = random_vector(rng, 3, 1.0);
      const Eigen::VectorXd a = riemann_spray(*m, x, y);
      const Eigen::VectorXd b = christoffel_spray(*m, x, y);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + b.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("ricci tensor is symmetric") {
  std::mt19937_64 rng(9);
  const BerwaldAlphaMetric m(3);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd x = random_vector(rng, 3, 0.5);
    const Eigen::MatrixXd r = ricci_tensor(m, x);
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + r.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("covariant derivative of a linear form on euclidean space") {
  auto e = std::make_shared<EuclideanMetric>(3);
  Eigen::Matrix3d a;
  a << 1, 2, 0, -2, 0.5, 1, 0, -1, 3;
  const LinearOneForm beta(e, a, Eigen::Vector3d(0.1, 0.0, -0.2));
  const Eigen::Vector3d x(0.3, -0.1, 0.2), y(1.0, 0.5, -0.5);
  const Eigen::MatrixXd bij = covariant_derivative(*e, beta, x);
  CHECK((bij - a).cwiseAbs().maxCoeff() < 1e-14);
  const auto d = split_rs(bij, Eigen::Matrix3d::Identity(), beta.components(Eigen::VectorXd(x)), y);
  CHECK((d.r - 0.5 * (a + a.transpose())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((d.s - 0.5 * (a - a.transpose())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(d.r00 == doctest::Approx(y.dot(a * y)));
  CHECK((d.s_up_0 - d.s * y).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("berwald beta has norm |x|") {
  auto alpha = std::make_shared<BerwaldAlphaMetric>(3);
  const BerwaldBetaForm beta(alpha);
  const Eigen::Vector3d x(0.3, -0.4, 0.2);
  CHECK(beta_norm(*alpha, beta, x) == doctest::Approx(x.norm()).epsilon(1e-12));
}

TEST_CASE("constant metric validation and points outside the chart") {
  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK_THROWS(ConstantMetric(bad));
  Eigen::Matrix2d asym;
  asym << 1, 0.1, 0, 1;
  CHECK_THROWS(ConstantMetric(asym));
  const BerwaldAlphaMetric m(2);
  CHECK_THROWS_AS(riemann_spray(m, Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(1.0, 0.0)), DomainError);
  CHECK(is_positive_definite(m, Eigen::Vector2d(0.2, 0.1)));
}
