#pragma once

// Dense solves that work for any scalar in the jet tower. Matrices here are
// metric tensors, so elimination proceeds without pivoting; a pivot that is
// tiny relative to the diagonal is reported as singular.

#include <cmath>
#include <string>

#include "finsq/types.hpp"

namespace finsq {

/// Solves A X = B for symmetric positive definite A.
template <class S>
MatX<S> solve_spd(MatX<S> a, MatX<S> b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) throw std::invalid_argument("solve_spd: dimension mismatch");
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(scalar_value(a(i, i))));
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(std::abs(scalar_value(a(k, k))) > 1e-14 * scale)) {
      throw SingularError("solve_spd: pivot " + std::to_string(k) + " is numerically zero");
    }
    const S inv = S(1.0) / a(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const S f = a(i, k) * inv;
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (Eigen::Index k = n; k-- > 0;) {
    const S inv = S(1.0) / a(k, k);
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      S acc = b(k, j);
      for (Eigen::Index m = k + 1; m < n; ++m) acc -= a(k, m) * b(m, j);
      b(k, j) = acc * inv;
    }
  }
  return b;
}

template <class S>
VecX<S> solve_spd(const MatX<S>& a, const VecX<S>& v) {
  MatX<S> rhs(v.size(), 1);
  for (Eigen::Index i = 0; i < v.size(); ++i) rhs(i, 0) = v(i);
  const MatX<S> x = solve_spd<S>(a, std::move(rhs));
  VecX<S> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = x(i, 0);
  return out;
}

template <class S>
MatX<S> inverse_spd(const MatX<S>& a) {
  MatX<S> id(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) id(i, j) = S(i == j ? 1.0 : 0.0);
  return solve_spd<S>(a, std::move(id));
}

/// v^T A w with explicit loops, so no Eigen kernel ever sees a jet.
template <class S>
S bilinear(const MatX<S>& a, const VecX<S>& v, const VecX<S>& w) {
  S acc(0.0);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    S row(0.0);
    for (Eigen::Index j = 0; j < a.cols(); ++j) row += a(i, j) * w(j);
    acc += v(i) * row;
  }
  return acc;
}

template <class S>
S dot(const VecX<S>& v, const VecX<S>& w) {
  S acc(0.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v(i) * w(i);
  return acc;
}

/// b^T A^{-1} b: the squared dual norm of a covector.
template <class S>
S dual_norm2(const MatX<S>& a, const VecX<S>& b) {
  return dot<S>(b, solve_spd<S>(a, b));
}

}  // namespace finsq
