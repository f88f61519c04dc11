#pragma once

#include <stdexcept>

#include <Eigen/Core>

#include "finsq/jet.hpp"

namespace finsq {

template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// Evaluation outside a chart, a metric's regularity region, or a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A matrix that had to be inverted was numerically singular.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace finsq

namespace finsq {

/// A checker's stated precondition does not hold for its input.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace finsq
