#include <cmath>

#include "doctest.h"
#include "finsq/construct.hpp"

using namespace finsq;

namespace {

SampleSet draw(const MetricPtr& alpha, const OneFormPtr& beta, std::size_t count, std::uint64_t seed = 11) {
  SamplingOptions o;
  o.samples = count;
  o.seed = seed;
  return draw_samples(domain_of(alpha, beta, 0.9), o);
}

SampleSet draw(const FinslerMetric& f, std::size_t count, std::uint64_t seed = 11) {
  SamplingOptions o;
  o.samples = count;
  o.seed = seed;
  return draw_samples(domain_of(f, 0.9), o);
}

WarpedProductSpec sphere_spec(int n, double c, double d) {
  WarpedProductSpec spec;
  spec.factor = sphere_factor(n - 1, c * c);
  spec.c = c;
  spec.d = d;
  return spec;
}

// Closed form of the family with xb = c x + a.
double family_f(double c, const Eigen::VectorXd& a, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd xb = c * x + a;
  const double q = 1.0 - xb.squaredNorm();
  const double xy = xb.dot(y);
  const double root = std::sqrt(q * y.squaredNorm() + xy * xy);
  return (root + xy) * (root + xy) / (q * q * root);
}

}  // namespace

TEST_CASE("sphere factors") {
  for (auto [m, kappa] : {std::pair{3, 1.0}, std::pair{2, 4.0}, std::pair{3, 4.0}}) {
    const auto f = sphere_factor(m, kappa);
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 0.2);
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(m, 1.0, 2.0);
    CHECK(riemann_ricci(*f, u, y) == doctest::Approx((m - 1) * kappa * y.dot(f->components(u) * y)).epsilon(1e-9));
  }
  CHECK_THROWS(sphere_factor(1, 1.0));
  CHECK_THROWS(sphere_factor(3, 0.0));
  // n = 4, c = 2 needs (n - 2) c^2 = 8 = (m - 1) kappa
  CHECK_NOTHROW(build_warped(sphere_spec(4, 2.0, 0.5)));
}

TEST_CASE("build_warped") {
  SUBCASE("c = 1, d = 0 is flat space in polar form") {
    const auto bar = build_warped(sphere_spec(3, 1.0, 0.0));
    const auto s = draw(bar.alpha, bar.beta, 20);
    for (const auto& x : s.samples) {
      CHECK(std::abs(riemann_ricci(*bar.alpha, x.x, x.y)) < 1e-10);
      CHECK(bar.beta->components(x.x)(0) == doctest::Approx(x.x(0)));
    }
    CHECK(check_bar_conditions(bar, s).constant("square_constant") == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("c = 0, d = 1 flat factor") {
    WarpedProductSpec spec;
    spec.factor = flat_factor(3);
    spec.d = 1.0;
    const auto bar = build_warped(spec);
    const auto s = draw(bar.alpha, nullptr, 20);
    const auto cert = check_bar_conditions(bar, s);
    CHECK(cert.pass());
    CHECK(cert.max_residual() == 0.0);
  }
  SUBCASE("c = 1, d = 0.5, S^3") {
    const auto bar = build_warped(sphere_spec(4, 1.0, 0.5));
    const auto cert = check_bar_conditions(bar, draw(bar.alpha, bar.beta, 30));
    CHECK(cert.pass());
    CHECK(cert.max_residual() < 1e-6);
    CHECK(cert.constant("square_constant") == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("errors") {
    WarpedProductSpec spec = sphere_spec(4, 1.0, 0.5);
    spec.c = 0.0;
    spec.d = 0.0;
    CHECK_THROWS_AS(build_warped(spec), std::invalid_argument);
    // sphere factor with c = 0 is not Ricci flat
    spec.d = 1.0;
    CHECK_THROWS_AS(build_warped(spec), std::invalid_argument);
    auto bad = sphere_spec(4, 1.0, 0.5);
    bad.t_range = std::pair{-1.0, 1.0};
    CHECK_THROWS_AS(build_warped(bad), DomainError);
    WarpedProductSpec neg;
    neg.factor = flat_factor(2);
    neg.d = -1.0;
    CHECK_THROWS_AS(build_warped(neg), DomainError);
  }
}

TEST_CASE("warped trace formula") {
  SUBCASE("c = 1, d = 0.5") {
    const auto bar = build_warped(sphere_spec(4, 1.0, 0.5));
    const auto& w = dynamic_cast<const WarpedMetric&>(*bar.alpha);
    for (const auto& s : draw(bar.alpha, bar.beta, 50).samples) CHECK(warped_ricci_residual(w, s.x, s.y) < 1e-7);
  }
  SUBCASE("c = 0, d = 1, flat factor") {
    WarpedProductSpec spec;
    spec.factor = flat_factor(3);
    spec.d = 1.0;
    const auto bar = build_warped(spec);
    const auto& w = dynamic_cast<const WarpedMetric&>(*bar.alpha);
    for (const auto& s : draw(bar.alpha, nullptr, 10).samples) {
      CHECK(warped_ricci_residual(w, s.x, s.y) == 0.0);
      CHECK(riemann_ricci(w, s.x, s.y) == 0.0);
    }
  }
  SUBCASE("h = t^2 breaks Ricci flatness but not the formula") {
    auto w = std::make_shared<WarpedMetric>(sphere_factor(3, 1.0), std::vector<double>{0.0, 0.0, 1.0}, 0.5, 1.5);
    double worst_flat = 0.0;
    for (const auto& s : draw(w, nullptr, 30).samples) {
      CHECK(warped_ricci_residual(*w, s.x, s.y) < 1e-7);
      worst_flat = std::max(worst_flat, std::abs(riemann_ricci(*w, s.x, s.y)) / s.y.dot(w->components(s.x) * s.y));
    }
    CHECK(worst_flat > 0.1);
  }
}

TEST_CASE("bar_to_square") {
  SUBCASE("flat pair gives berwald's metric") {
    auto e = std::make_shared<EuclideanMetric>(3);
    const DeformedPairBar bar{e, std::make_shared<LinearOneForm>(e, Eigen::MatrixXd::Identity(3, 3),
                                                                 Eigen::VectorXd::Zero(3))};
    const auto f = bar_to_square(bar);
    const auto b = berwald_metric(3);
    for (const auto& s : draw(*b, 50).samples) {
      CHECK(f_value(*f, s.x, s.y) == doctest::Approx(f_value(*b, s.x, s.y)).epsilon(1e-12));
    }
  }
  SUBCASE("zero one-form gives alpha") {
    auto sph = std::make_shared<SphereMetric>(3, 1.0);
    const DeformedPairBar bar{sph, std::make_shared<LinearOneForm>(sph, Eigen::MatrixXd::Zero(3, 3),
                                                                   Eigen::VectorXd::Zero(3))};
    const auto f = bar_to_square(bar);
    const Eigen::Vector3d x(0.1, 0.2, 0.3), y(1.0, -1.0, 0.5);
    CHECK(f_value(*f, x, y) == doctest::Approx(alpha_norm(*sph, x, y)).epsilon(1e-14));
  }
  SUBCASE("b >= 1") {
    auto e = std::make_shared<EuclideanMetric>(2);
    const DeformedPairBar bar{e, std::make_shared<LinearOneForm>(e, Eigen::MatrixXd::Zero(2, 2),
                                                                 Eigen::Vector2d(1.0, 0.0))};
    CHECK_THROWS_AS(bar_to_square(bar), DomainError);
  }
  SUBCASE("warped pipeline is Ricci flat, of Douglas type, and flat in dimension 4") {
    const auto bar = build_warped(sphere_spec(4, 1.0, 0.5));
    const auto f = bar_to_square(bar);
    const auto orig = bar_to_original(bar);
    const auto f3 = square_metric(orig);
    const auto s = draw(*f, 30);
    CHECK(s.samples.size() == 30);
    for (const auto& x : s.samples) {
      CHECK(f_value(*f, x.x, x.y) == doctest::Approx(f_value(*f3, x.x, x.y)).epsilon(1e-9));
      const auto data = curvature(*f, x.x, x.y);
      CHECK(einstein_residual(data, 4, 0.0) < 1e-6);
      CHECK(cfc_residual(data, x.y, 0.0) < 1e-6);
      CHECK(flag_curvature(data, x.y, x.u) == doctest::Approx(0.0).scale(1e-6));
    }
    CHECK(check_douglas(*f, draw(*f, 5)).pass());
    CHECK(check_closed(orig, draw(orig.alpha, orig.beta, 30)).pass());
    CHECK(check_theorem_1_1(orig, draw(orig.alpha, orig.beta, 10)).pass());
  }
}

TEST_CASE("berwald family") {
  SUBCASE("c = 1, a = 0 is berwald's metric") {
    const auto f = berwald_family(3, {1.0, {}});
    const auto b = berwald_metric(3);
    for (const auto& s : draw(*b, 50).samples) {
      CHECK(f_value(*f, s.x, s.y) == doctest::Approx(f_value(*b, s.x, s.y)).epsilon(1e-12));
    }
  }
  SUBCASE("c = 0, a = 0 is euclidean") {
    const auto f = berwald_family(3, {0.0, {}});
    const Eigen::Vector3d x(0.3, 0.2, 0.1), y(1.0, 2.0, -2.0);
    CHECK(f_value(*f, x, y) == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("c = 2, a = 0 has zero flag curvature") {
    const auto f = berwald_family(3, {2.0, {}});
    const Eigen::Vector3d x(0.1, 0.0, 0.0), y(0.0, 1.0, 0.0), u(0.0, 0.0, 1.0);
    CHECK(std::abs(flag_curvature(*f, x, y, u)) < 1e-6);
  }
  SUBCASE("matches the closed expression and the (1, 0) member") {
    const Eigen::Vector3d a(0.2, -0.1, 0.3);
    const double c = 1.5;
    const auto f = berwald_family(3, {c, a});
    const auto base = berwald_family(3, {1.0, {}});
    for (const auto& s : draw(*f, 40).samples) {
      const double v = f_value(*f, s.x, s.y);
      CHECK(v == doctest::Approx(family_f(c, a, s.x, s.y)).epsilon(1e-12));
      const Eigen::VectorXd xb = c * s.x + a;
      CHECK(v == doctest::Approx(f_value(*base, xb, s.y)).epsilon(1e-10));
    }
    CHECK(check_douglas(*f, draw(*f, 5)).pass());
    const auto orig = bar_to_original(berwald_family_pair(3, {c, a}));
    const auto s = draw(orig.alpha, orig.beta, 20);
    const auto cert = check_theorem_1_1(orig, s);
    CHECK(cert.pass());
    CHECK(cert.constant("square_constant") == doctest::Approx(c).epsilon(1e-9));
    CHECK(check_closed(orig, s).pass());
  }
  SUBCASE("empty domain") { CHECK_THROWS_AS(berwald_family(2, {0.0, Eigen::Vector2d(1.0, 0.5)}), DomainError); }
}

TEST_CASE("rigidity in dimension 3") {
  const auto bar = build_warped(sphere_spec(3, 1.0, 0.0));
  const auto f = bar_to_square(bar);
  for (const auto& s : draw(*f, 30).samples) {
    CHECK(std::abs(flag_curvature(*f, s.x, s.y, s.u)) < 1e-6);
  }
}
