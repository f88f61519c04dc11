#pragma once

// Reproducible sampling of points and directions. Every draw is a pure
// function of (seed, sample index, stream, counter), so a sample set does
// not depend on thread count or evaluation order.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "finsq/finsler.hpp"

namespace finsq {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t index, std::uint64_t stream, std::uint64_t counter) const;
  /// Uniform in [0, 1).
  double uniform(std::uint64_t index, std::uint64_t stream, std::uint64_t counter) const;
  double normal(std::uint64_t index, std::uint64_t stream, std::uint64_t counter) const;
  /// Uniform on the Euclidean unit sphere in R^n.
  Eigen::VectorXd unit_vector(int n, std::uint64_t index, std::uint64_t stream) const;
  /// Uniform in the Euclidean ball of the given radius.
  Eigen::VectorXd in_ball(int n, double radius, std::uint64_t index, std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
};

struct SamplingOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  double max_x = 0.8;
  double b_cap = 0.9;
  int max_attempts = 256;
};

struct SampleDomain {
  int dim = 0;
  Eigen::VectorXd center;
  std::function<bool(const Eigen::VectorXd&)> accept;
  /// Metric whose unit sphere y is drawn from; identity when empty.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> y_metric;
  /// Optional rescaling of y after drawing, e.g. to F(x, y) = 1.
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> y_norm;
};

struct Sample {
  std::size_t index = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd u;  // transverse edge for flags
};

struct SampleSet {
  std::vector<Sample> samples;
  std::size_t skipped = 0;  // indices whose rejection sampling ran out of attempts
};

SampleSet draw_samples(const SampleDomain& domain, const SamplingOptions& options);

/// Domain of a Finsler metric; for (alpha, beta)-metrics also b <= b_cap, with y on the alpha sphere.
SampleDomain domain_of(const FinslerMetric& metric, double b_cap);
/// Domain of a pair: alpha's chart, and b <= b_cap when beta is given.
SampleDomain domain_of(const MetricPtr& alpha, const OneFormPtr& beta, double b_cap);

}  // namespace finsq
