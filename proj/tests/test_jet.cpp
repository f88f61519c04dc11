#include <random>

#include "doctest.h"
#include "finsq/differentiation.hpp"
#include "finsq/linalg.hpp"

using namespace finsq;

namespace {

template <class V>
using scalar_of = typename std::decay_t<V>::Scalar;

// Fields used to exercise the engine. All of them are smooth near the sampled points.
auto quadratic_x1 = [](const auto& x, const auto& y) {
  (void)y;
  return x(0) * x(0);
};

auto norm_y_squared = [](const auto& x, const auto& y) {
  (void)x;
  using S = scalar_of<decltype(y)>;
  return dot<S>(y, y);
};

auto inner_squared = [](const auto& x, const auto& y) {
  using S = scalar_of<decltype(y)>;
  const S v = dot<S>(x, y);
  return v * v;
};

auto constant_five = [](const auto& x, const auto& y) {
  (void)x;
  using S = scalar_of<decltype(y)>;
  return S(5.0);
};

// A rational/radical field shaped like a square metric on the unit ball.
auto radical_field = [](const auto& x, const auto& y) {
  using S = scalar_of<decltype(y)>;
  using std::sqrt;
  const S q = 1.0 - dot<S>(x, x);
  const S xy = dot<S>(x, y);
  const S root = sqrt(q * dot<S>(y, y) + xy * xy);
  const S num = root + xy;
  return num * num / (q * q * root);
};

auto exp_field = [](const auto& x, const auto& y) {
  using S = scalar_of<decltype(y)>;
  using std::exp;
  using std::sin;
  return exp(x(0) * 2.0) * dot<S>(y, y) + sin(x(1) * y(0));
};

double plain(const auto& field, const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return field(x, y); }

}  // namespace

TEST_CASE("seed gives identity first-order coefficients") {
  const Eigen::Vector2d x(1.0, 2.0);
  const Eigen::MatrixXd dirs = Eigen::Vector2d(1.0, 0.0);
  const auto s = seed(x, dirs, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0].value() == 1.0);
  CHECK(s[1].value() == 2.0);
  CHECK(partial(s[0], {1}) == 1.0);
  CHECK(partial(s[1], {1}) == 0.0);

  const Jet1 f = s[0] * s[0];
  CHECK(f.value() == 1.0);
  CHECK(partial(f, {1}) == 2.0);
  CHECK(partial(f, {2}) == 2.0);
}

TEST_CASE("seed rejects empty direction sets and order zero") {
  const Eigen::Vector2d x(1.0, 2.0);
  CHECK_THROWS_AS(seed(x, Eigen::MatrixXd(2, 0), 2), std::invalid_argument);
  CHECK_THROWS_AS(seed(x, Eigen::MatrixXd::Identity(2, 2), 0), OrderError);
}

TEST_CASE("sqrt(1 + t) at t = 0") {
  // hand differentiation: f = 1, f' = 1/2, f'' = -1/4
  const auto t = seed(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 2);
  const Jet1 f = sqrt(1.0 + t[0]);
  CHECK(f.value() == doctest::Approx(1.0));
  CHECK(partial(f, {1}) == doctest::Approx(0.5));
  CHECK(partial(f, {2}) == doctest::Approx(-0.25));
}

TEST_CASE("elementary functions match closed-form derivatives") {
  const auto t = seed(Eigen::VectorXd::Constant(1, 0.7), Eigen::MatrixXd::Identity(1, 1), 3);
  const double v = 0.7;
  const Jet1 e = exp(t[0]);
  const Jet1 l = log(t[0]);
  const Jet1 s = sin(t[0]);
  const Jet1 c = cos(t[0]);
  const Jet1 p = pow(t[0], 1.5);
  const Jet1 r = 1.0 / t[0];
  CHECK(partial(e, {3}) == doctest::Approx(std::exp(v)).epsilon(1e-14));
  CHECK(partial(l, {3}) == doctest::Approx(2.0 / (v * v * v)).epsilon(1e-14));
  CHECK(partial(s, {3}) == doctest::Approx(-std::cos(v)).epsilon(1e-14));
  CHECK(partial(c, {3}) == doctest::Approx(std::sin(v)).epsilon(1e-14));
  CHECK(partial(p, {2}) == doctest::Approx(0.75 / std::sqrt(v)).epsilon(1e-14));
  CHECK(partial(r, {3}) == doctest::Approx(-6.0 / (v * v * v * v)).epsilon(1e-14));
  CHECK(partial(pow(t[0], 3), {3}) == doctest::Approx(6.0));
  CHECK(partial(pow(t[0], -2), {1}) == doctest::Approx(-2.0 / (v * v * v)).epsilon(1e-14));
}

TEST_CASE("partial on scalar fields") {
  const Eigen::Vector2d x(0.3, -0.2);
  const Eigen::Vector2d y(0.5, 1.5);
  const DerivativeSpec cap{2, 3};
  CHECK(partial(norm_y_squared, x, y, {{0, 0}, {2, 0}}, cap) == doctest::Approx(2.0));

  const Eigen::Vector2d e1(1.0, 0.0);
  CHECK(partial(inner_squared, e1, e1, {{1, 0}, {1, 0}}, cap) == doctest::Approx(4.0));

  CHECK(partial(constant_five, x, y, {{1, 0}, {0, 2}}, cap) == 0.0);
  CHECK(partial(constant_five, x, y, {{0, 0}, {0, 0}}, cap) == 5.0);
  CHECK(partial(quadratic_x1, x, y, {{2, 0}, {0, 0}}, cap) == doctest::Approx(2.0));
}

TEST_CASE("partial refuses orders beyond the declared capability") {
  const Eigen::Vector2d x(0.3, -0.2);
  const Eigen::Vector2d y(0.5, 1.5);
  CHECK_THROWS_AS(partial(norm_y_squared, x, y, {{0, 0}, {2, 2}}, {2, 3}), OrderError);
  CHECK_THROWS_AS(partial(norm_y_squared, x, y, {{2, 1}, {0, 0}}, {2, 3}), OrderError);
}

TEST_CASE("partial reports non-finite fields") {
  const Eigen::Vector2d x(0.3, -0.2);
  const Eigen::Vector2d zero(0.0, 0.0);
  auto alpha = [](const auto& xx, const auto& yy) {
    (void)xx;
    using S = scalar_of<decltype(yy)>;
    using std::sqrt;
    return sqrt(dot<S>(yy, yy));
  };
  CHECK_THROWS_AS(partial(alpha, x, zero, {{0, 0}, {1, 0}}, {2, 3}), DomainError);
}

TEST_CASE("jet truncation is never silent") {
  const auto a = seed(Eigen::Vector2d(1.0, 2.0), Eigen::MatrixXd::Identity(2, 2), 2);
  const auto b = seed(Eigen::Vector2d(1.0, 2.0), Eigen::MatrixXd::Identity(2, 2), 3);
  CHECK_THROWS_AS(a[0] * b[0], OrderError);
  CHECK_THROWS_AS(a[0] + b[0], OrderError);
  CHECK_THROWS_AS(partial(a[0], {2, 1}), OrderError);
  CHECK_THROWS_AS(truncate(a[0], 3), OrderError);
  CHECK_NOTHROW(truncate(b[0], 2) * a[0]);
}

TEST_CASE("differentiate_vectorfield examples") {
  auto zero_field = [](const auto& x, const auto& y) {
    using S = scalar_of<decltype(y)>;
    (void)x;
    return std::vector<S>(static_cast<std::size_t>(y.size()), S(0.0));
  };
  auto spray_like = [](const auto& x, const auto& y) {
    using S = scalar_of<decltype(y)>;
    const S xy = dot<S>(x, y);
    std::vector<S> g;
    for (Eigen::Index i = 0; i < y.size(); ++i) g.push_back(y(i) * xy);
    return g;
  };
  Eigen::Matrix3d A;
  A << 1, 2, 3, -1, 0.5, 4, 2, 2, -3;
  auto linear_field = [A](const auto& x, const auto& y) {
    using S = scalar_of<decltype(y)>;
    (void)x;
    std::vector<S> g;
    for (int i = 0; i < 3; ++i) {
      S acc(0.0);
      for (int j = 0; j < 3; ++j) acc += y(j) * A(i, j);
      g.push_back(acc);
    }
    return g;
  };

  const Eigen::Vector3d x(0.1, 0.2, -0.3);
  const Eigen::Vector3d y(0.4, -1.0, 0.7);
  const auto t0 = differentiate_vectorfield(zero_field, x, y, {2, 3});
  CHECK(t0.dx.cwiseAbs().maxCoeff() == 0.0);
  CHECK(t0.dydy[1].cwiseAbs().maxCoeff() == 0.0);

  const auto t1 = differentiate_vectorfield(spray_like, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX(), {2, 3});
  CHECK(t1.dx(0, 0) == doctest::Approx(1.0));

  const auto t2 = differentiate_vectorfield(linear_field, x, y, {2, 3});
  for (const auto& m : t2.dydy) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
  CHECK((t2.dy - A).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(differentiate_vectorfield(linear_field, x, y, {0, 3}), OrderError);
}

namespace {

// Richardson-extrapolated central difference of g along coordinate k.
template <class G>
double richardson(const G& g, const Eigen::VectorXd& p, int k, double h) {
  auto central = [&](double step) {
    Eigen::VectorXd up = p;
    Eigen::VectorXd dn = p;
    up(k) += step;
    dn(k) -= step;
    return (g(up) - g(dn)) / (2.0 * step);
  };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

}  // namespace

TEST_CASE("jet partials agree with Richardson finite differences up to (x:2, y:3)") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const int n = 2;
  const DerivativeSpec cap{2, 3};

  auto check_field = [&](const auto& field, const char* label) {
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::VectorXd x(n), y(n);
      for (int i = 0; i < n; ++i) {
        x(i) = u(rng);
        y(i) = 1.0 + u(rng);
      }
      // Every multi-index with |ix| <= 2, |iy| <= 3 and at least one derivative.
      for (int a0 = 0; a0 <= 2; ++a0)
        for (int a1 = 0; a0 + a1 <= 2; ++a1)
          for (int b0 = 0; b0 <= 3; ++b0)
            for (int b1 = 0; b0 + b1 <= 3; ++b1) {
              const MixedIndex idx{{a0, a1}, {b0, b1}};
              if (a0 + a1 + b0 + b1 == 0) continue;
              // Lower one derivative, then difference numerically along the removed direction.
              MixedIndex lower = idx;
              int k = 0;
              bool along_x = true;
              if (a0 > 0) { lower.x[0] -= 1; k = 0; }
              else if (a1 > 0) { lower.x[1] -= 1; k = 1; }
              else if (b0 > 0) { lower.y[0] -= 1; k = 0; along_x = false; }
              else { lower.y[1] -= 1; k = 1; along_x = false; }
              const double exact = partial(field, x, y, idx, cap);
              double fd = 0.0;
              if (along_x) {
                fd = richardson([&](const Eigen::VectorXd& p) { return lower.x == std::vector<int>{0, 0} && lower.y == std::vector<int>{0, 0} ? plain(field, p, y) : partial(field, p, y, lower, cap); }, x, k, 1e-3);
              } else {
                fd = richardson([&](const Eigen::VectorXd& p) { return lower.x == std::vector<int>{0, 0} && lower.y == std::vector<int>{0, 0} ? plain(field, x, p) : partial(field, x, p, lower, cap); }, y, k, 1e-3);
              }
              INFO(label << " index x(" << a0 << a1 << ") y(" << b0 << b1 << ")");
              CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
    }
  };
  check_field(radical_field, "radical");
  check_field(exp_field, "exp");
  check_field(inner_squared, "inner");
}

TEST_CASE("Leibniz rule holds exactly on random polynomial pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int order = 4;
  const auto layout = JetLayout::make(2, order);
  for (int trial = 0; trial < 50; ++trial) {
    // random cubic polynomials in two variables, evaluated on seeded coordinates
    const Eigen::Vector2d p(u(rng), u(rng));
    const auto v = seed(p, Eigen::MatrixXd::Identity(2, 2), order);
    auto poly = [&](std::array<double, 10> c) {
      const Jet1& s = v[0];
      const Jet1& t = v[1];
      return c[0] + s * c[1] + t * c[2] + s * s * c[3] + s * t * c[4] + t * t * c[5] + s * s * s * c[6] +
             s * s * t * c[7] + s * t * t * c[8] + t * t * t * c[9];
    };
    std::array<double, 10> cf{}, cg{};
    for (auto& c : cf) c = u(rng);
    for (auto& c : cg) c = u(rng);
    const Jet1 f = poly(cf);
    const Jet1 g = poly(cg);
    const Jet1 fg = f * g;
    for (int a = 0; a <= order; ++a) {
      for (int b = 0; a + b <= order; ++b) {
        double leibniz = 0.0;
        for (int i = 0; i <= a; ++i) {
          for (int j = 0; j <= b; ++j) {
            const double binom = std::tgamma(a + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(a - i + 1.0)) *
                                 std::tgamma(b + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(b - j + 1.0));
            leibniz += binom * partial(f, {i, j}) * partial(g, {a - i, b - j});
          }
        }
        CHECK(std::abs(partial(fg, {a, b}) - leibniz) <= 1e-12 * std::max(1.0, std::abs(leibniz)));
      }
    }
  }
}

TEST_CASE("nested order-2 jets reproduce a flat order-4 jet") {
  // f(x, y) for scalar x, y: flat jet over (x, y) versus outer-x / inner-y nesting.
  auto f = [](const auto& x, const auto& y) {
    using std::sqrt;
    const auto r = sqrt(x * x + y * y * 2.0 + 1.0);
    return (x * y * y + 3.0) / r + x * x * x * y - 1.0 / (2.0 + x + y);
  };
  const double x0 = 0.3;
  const double y0 = -0.7;
  const auto flat = seed(Eigen::Vector2d(x0, y0), Eigen::MatrixXd::Identity(2, 2), 4);
  const Jet1 ff = f(flat[0], flat[1]);

  const auto s = seed_xy(Eigen::VectorXd::Constant(1, x0), Eigen::VectorXd::Constant(1, y0), {2, 2});
  const Jet2 nf = f(s.x(0), s.y(0));
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= 2; ++b) {
      const std::vector<int> ia{a};
      const std::vector<int> ib{b};
      const double nested = partial_xy(nf, ia, ib);
      const double reference = partial(ff, {a, b});
      CHECK(std::abs(nested - reference) <= 1e-12 * std::max(1.0, std::abs(reference)));
    }
  }
}

TEST_CASE("derivative and truncate operate on the right level") {
  const auto s = seed_xy(Eigen::Vector2d(0.2, 0.1), Eigen::Vector2d(1.0, -0.5), {2, 3});
  const Jet2 f = s.x(0) * s.x(0) * s.y(1) * s.y(1) * s.y(0);
  const Jet2 fy = dy(f, 1);
  const Jet2 fx = dx(f, 0);
  const std::vector<int> zero{0, 0};
  // d/dy2 = 2 x1^2 y2 y1, d/dx1 = 2 x1 y2^2 y1
  CHECK(partial_xy(fy, zero, zero) == doctest::Approx(2 * 0.04 * -0.5 * 1.0));
  CHECK(partial_xy(fx, zero, zero) == doctest::Approx(2 * 0.2 * 0.25 * 1.0));
  CHECK(fx.order() == 1);
  CHECK(fy[0].order() == 2);
  const Jet2 t = truncate_xy(f, 1, 1);
  CHECK(t.order() == 1);
  CHECK(t[0].order() == 1);
}
