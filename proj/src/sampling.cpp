#include "finsq/sampling.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Cholesky>

#include "finsq/parallel.hpp"

namespace finsq {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kPointStream = 1;
constexpr std::uint64_t kDirectionStream = 1ULL << 20;
constexpr std::uint64_t kEdgeStream = 2ULL << 20;

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t index, std::uint64_t stream, std::uint64_t counter) const {
  return splitmix(splitmix(splitmix(seed_) ^ index) ^ splitmix(stream * 0x632be59bd9b4e019ULL + counter));
}

double CounterRng::uniform(std::uint64_t index, std::uint64_t stream, std::uint64_t counter) const {
  return static_cast<double>(bits(index, stream, counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index, std::uint64_t stream, std::uint64_t counter) const {
  const double u1 = 1.0 - uniform(index, stream, 2 * counter);
  const double u2 = uniform(index, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd CounterRng::unit_vector(int n, std::uint64_t index, std::uint64_t stream) const {
  for (std::uint64_t round = 0;; ++round) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(index, stream, round * 64 + static_cast<std::uint64_t>(i));
    const double len = v.norm();
    if (len > 1e-12) return v / len;
  }
}

Eigen::VectorXd CounterRng::in_ball(int n, double radius, std::uint64_t index, std::uint64_t stream) const {
  const double r = radius * std::pow(uniform(index, stream, 1u << 16), 1.0 / n);
  return r * unit_vector(n, index, stream);
}

SampleSet draw_samples(const SampleDomain& domain, const SamplingOptions& options) {
  if (domain.dim < 1) throw std::invalid_argument("draw_samples: domain dimension must be positive");
  const CounterRng rng(options.seed);
  const Eigen::VectorXd center = domain.center.size() == domain.dim ? domain.center
                                                                    : Eigen::VectorXd::Zero(domain.dim);
  auto draw = [&](std::size_t i) -> std::optional<Sample> {
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
      const Eigen::VectorXd x =
          center + rng.in_ball(domain.dim, options.max_x, i, kPointStream + static_cast<std::uint64_t>(attempt));
      try {
        if (domain.accept && !domain.accept(x)) continue;
        Sample s;
        s.index = i;
        s.x = x;
        Eigen::VectorXd y = rng.unit_vector(domain.dim, i, kDirectionStream);
        Eigen::VectorXd u = rng.unit_vector(domain.dim, i, kEdgeStream);
        if (domain.y_metric) {
          const Eigen::LLT<Eigen::MatrixXd> llt(domain.y_metric(x));
          if (llt.info() != Eigen::Success) continue;
          // a = L L^T; y = L^-T z has a(y, y) = |z|^2
          y = llt.matrixU().solve(y);
          u = llt.matrixU().solve(u);
        }
        if (domain.y_norm) {
          const double f = domain.y_norm(x, y);
          if (!(f > 0.0) || !std::isfinite(f)) continue;
          y /= f;
        }
        s.y = y;
        s.u = u;
        return s;
      } catch (const std::exception&) {
        continue;
      }
    }
    return std::nullopt;
  };
  const auto drawn = parallel_map<std::optional<Sample>>(options.samples, draw);
  SampleSet out;
  for (const auto& s : drawn) {
    if (s) {
      out.samples.push_back(*s);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

SampleDomain domain_of(const MetricPtr& alpha, const OneFormPtr& beta, double b_cap) {
  SampleDomain d;
  d.dim = alpha->dim();
  d.center = alpha->chart_center();
  d.accept = [alpha, beta, b_cap](const Eigen::VectorXd& x) {
    if (!alpha->in_domain(x)) return false;
    if (!beta) return true;
    const double b = beta_norm(*alpha, *beta, x);
    return std::isfinite(b) && b <= b_cap;
  };
  d.y_metric = [alpha](const Eigen::VectorXd& x) { return alpha->components(x); };
  return d;
}

SampleDomain domain_of(const FinslerMetric& metric, double b_cap) {
  if (const auto* ab = dynamic_cast<const GeneralABMetric*>(&metric)) {
    SampleDomain d = domain_of(ab->alpha(), ab->beta(), b_cap);
    const MetricPtr alpha = ab->alpha();
    const OneFormPtr beta = ab->beta();
    const PhiPtr phi = ab->phi();
    d.accept = [alpha, beta, phi, b_cap](const Eigen::VectorXd& x) {
      if (!alpha->in_domain(x)) return false;
      const double b = beta_norm(*alpha, *beta, x);
      return std::isfinite(b) && b <= b_cap && phi->in_domain(b * b, 0.0);
    };
    return d;
  }
  SampleDomain d;
  d.dim = metric.dim();
  d.center = metric.chart_center();
  d.accept = [&metric](const Eigen::VectorXd& x) { return metric.in_domain(x); };
  d.y_norm = [&metric](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return f_value(metric, x, y); };
  if (const MetricPtr ref = metric.reference_metric()) {
    d.y_metric = [ref](const Eigen::VectorXd& x) { return ref->components(x); };
    d.y_norm = nullptr;
  }
  return d;
}

}  // namespace finsq
