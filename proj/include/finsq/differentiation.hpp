#pragma once

// Seeding and extraction of mixed partials of fields of (x, y).
//
// Fields are generic callables `f(x, y)` taking VecX<S> arguments for every
// scalar S in the jet tower. For a field of (x, y) the engine uses nested
// jets: the outer level perturbs base-point directions x, the inner level
// perturbs fiber directions y, with independent truncation orders.

#include <span>
#include <string>
#include <vector>

#include "finsq/types.hpp"

namespace finsq {

/// Declared derivative capability of a computation.
struct DerivativeSpec {
  int x_order = 2;
  int y_order = 3;
};

/// Multi-indices over the base-point and fiber directions.
struct MixedIndex {
  std::vector<int> x;
  std::vector<int> y;
};

/// Jet-valued coordinates `point + sum_d t_d * directions.col(d)` with vars = directions.cols().
std::vector<Jet1> seed(const Eigen::VectorXd& point, const Eigen::MatrixXd& directions, int order);

struct XYSeed {
  VecX<Jet2> x;
  VecX<Jet2> y;
};

/// Coordinates of (x, y) as nested jets: outer order spec.x_order in x, inner order spec.y_order in y.
XYSeed seed_xy(const Eigen::VectorXd& x, const Eigen::VectorXd& y, DerivativeSpec spec);

/// Derivative in base-point direction k (outer level).
Jet2 dx(const Jet2& j, int k);
/// Derivative in fiber direction k (inner level).
Jet2 dy(const Jet2& j, int k);
Jet2 truncate_xy(const Jet2& j, int x_order, int y_order);

/// Mixed partial of a nested jet; throws OrderError past either truncation order.
double partial_xy(const Jet2& j, std::span<const int> x_index, std::span<const int> y_index);

/// Partials of a vector field used by Berwald's curvature formula.
struct PartialTable {
  Eigen::VectorXd value;              // G^i
  Eigen::MatrixXd dx;                 // (i, k): dG^i/dx^k
  Eigen::MatrixXd dy;                 // (i, m): dG^i/dy^m
  std::vector<Eigen::MatrixXd> dxdy;  // [i](m, k): d2G^i/dx^m dy^k
  std::vector<Eigen::MatrixXd> dydy;  // [i](m, k): d2G^i/dy^m dy^k
};

/// Reads the table off jets of x-order >= 1 and y-order >= 2.
PartialTable tabulate(std::span<const Jet2> components);

namespace detail {
[[noreturn]] void throw_not_finite(const std::string& what);
}

/// Exact mixed partial of a scalar field at (x, y).
template <class Field>
double partial(const Field& field, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const MixedIndex& index,
               DerivativeSpec declared) {
  if (static_cast<Eigen::Index>(index.x.size()) != x.size() || static_cast<Eigen::Index>(index.y.size()) != y.size()) {
    throw std::invalid_argument("partial: multi-index length does not match the point dimension");
  }
  int ox = 0;
  int oy = 0;
  for (int a : index.x) ox += a;
  for (int a : index.y) oy += a;
  if (ox > declared.x_order || oy > declared.y_order) {
    throw OrderError("partial: multi-index of order (" + std::to_string(ox) + ", " + std::to_string(oy) +
                     ") exceeds declared capability (" + std::to_string(declared.x_order) + ", " +
                     std::to_string(declared.y_order) + ")");
  }
  const auto s = seed_xy(x, y, {std::max(ox, 1), std::max(oy, 1)});
  const Jet2 value = field(s.x, s.y);
  const double d = partial_xy(value, index.x, index.y);
  if (!std::isfinite(d)) detail::throw_not_finite("partial: field is not finite at the requested point");
  return d;
}

/// All partials of PartialTable for a vector field of (x, y).
template <class Field>
PartialTable differentiate_vectorfield(const Field& field, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                       DerivativeSpec declared) {
  if (declared.x_order < 1 || declared.y_order < 2) {
    throw OrderError("differentiate_vectorfield: needs x_order >= 1 and y_order >= 2");
  }
  const auto s = seed_xy(x, y, {1, 2});
  const std::vector<Jet2> components = field(s.x, s.y);
  return tabulate(components);
}

}  // namespace finsq
