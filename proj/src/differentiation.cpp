#include "finsq/differentiation.hpp"

namespace finsq {

namespace detail {
void throw_not_finite(const std::string& what) { throw DomainError(what); }
}  // namespace detail

std::vector<Jet1> seed(const Eigen::VectorXd& point, const Eigen::MatrixXd& directions, int order) {
  if (directions.cols() == 0) throw std::invalid_argument("seed: at least one direction is required");
  if (order < 1) throw OrderError("seed: order must be at least 1");
  if (directions.rows() != point.size()) throw std::invalid_argument("seed: direction length differs from point");
  const auto layout = JetLayout::make(static_cast<int>(directions.cols()), order);
  std::vector<Jet1> out;
  out.reserve(static_cast<std::size_t>(point.size()));
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    std::vector<double> c(layout->size(), 0.0);
    c[0] = point(i);
    for (Eigen::Index d = 0; d < directions.cols(); ++d) c[1 + static_cast<std::size_t>(d)] = directions(i, d);
    out.emplace_back(layout, std::move(c));
  }
  return out;
}

XYSeed seed_xy(const Eigen::VectorXd& x, const Eigen::VectorXd& y, DerivativeSpec spec) {
  if (x.size() != y.size() || x.size() == 0) throw std::invalid_argument("seed_xy: x and y must share a dimension");
  if (spec.x_order < 0 || spec.y_order < 0) throw OrderError("seed_xy: orders must be non-negative");
  const int n = static_cast<int>(x.size());
  const auto outer = JetLayout::make(n, spec.x_order);
  const auto inner = JetLayout::make(n, spec.y_order);
  XYSeed s{VecX<Jet2>(n), VecX<Jet2>(n)};
  for (int i = 0; i < n; ++i) {
    s.x(i) = Jet2::variable(outer, Jet1(x(i)), i);
    std::vector<Jet1> c(outer->size(), Jet1(0.0));
    c[0] = Jet1::variable(inner, y(i), i);
    s.y(i) = Jet2(outer, std::move(c));
  }
  return s;
}

Jet2 dx(const Jet2& j, int k) { return derivative(j, k); }

Jet2 dy(const Jet2& j, int k) {
  return map_coeffs(j, [k](const Jet1& c) { return derivative(c, k); });
}

Jet2 truncate_xy(const Jet2& j, int x_order, int y_order) {
  return map_coeffs(truncate(j, x_order), [y_order](const Jet1& c) { return truncate(c, y_order); });
}

double partial_xy(const Jet2& j, std::span<const int> x_index, std::span<const int> y_index) {
  int degree = 0;
  for (int a : y_index) degree += a;
  const Jet1 inner = partial(j, x_index);
  if (!inner.is_constant()) {
    if (static_cast<int>(y_index.size()) != inner.vars()) throw OrderError("partial_xy: y multi-index length");
    if (degree > inner.order()) {
      throw OrderError("partial_xy: fiber derivative of degree " + std::to_string(degree) + " exceeds jet order " +
                       std::to_string(inner.order()));
    }
  }
  return partial(inner, y_index);
}

PartialTable tabulate(std::span<const Jet2> components) {
  const auto m = static_cast<Eigen::Index>(components.size());
  if (m == 0) throw std::invalid_argument("tabulate: empty field");
  const Eigen::Index n = m;
  PartialTable t;
  t.value.resize(m);
  t.dx.resize(m, n);
  t.dy.resize(m, n);
  t.dxdy.assign(static_cast<std::size_t>(m), Eigen::MatrixXd(n, n));
  t.dydy.assign(static_cast<std::size_t>(m), Eigen::MatrixXd(n, n));

  std::vector<int> zero(static_cast<std::size_t>(n), 0);
  auto unit = [&](Eigen::Index k) {
    auto e = zero;
    e[static_cast<std::size_t>(k)] = 1;
    return e;
  };
  auto check = [](double v, Eigen::Index i, const std::vector<int>& xi, const std::vector<int>& yi) {
    if (!std::isfinite(v)) {
      std::string label = "component " + std::to_string(i) + ", index x(";
      for (int a : xi) label += std::to_string(a);
      label += ") y(";
      for (int a : yi) label += std::to_string(a);
      detail::throw_not_finite("tabulate: non-finite partial at " + label + ")");
    }
    return v;
  };

  for (Eigen::Index i = 0; i < m; ++i) {
    const Jet2& g = components[static_cast<std::size_t>(i)];
    t.value(i) = check(partial_xy(g, zero, zero), i, zero, zero);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto ek = unit(k);
      t.dx(i, k) = check(partial_xy(g, ek, zero), i, ek, zero);
      t.dy(i, k) = check(partial_xy(g, zero, ek), i, zero, ek);
      for (Eigen::Index mm = 0; mm < n; ++mm) {
        const auto em = unit(mm);
        t.dxdy[static_cast<std::size_t>(i)](mm, k) = check(partial_xy(g, em, ek), i, em, ek);
        auto emk = zero;
        emk[static_cast<std::size_t>(mm)] += 1;
        emk[static_cast<std::size_t>(k)] += 1;
        t.dydy[static_cast<std::size_t>(i)](mm, k) = check(partial_xy(g, zero, emk), i, zero, emk);
      }
    }
  }
  return t;
}

}  // namespace finsq
