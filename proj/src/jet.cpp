#include "finsq/jet.hpp"

#include <functional>

namespace finsq {

std::shared_ptr<const JetLayout> JetLayout::make(int vars, int order) {
  if (vars < 1 || vars > kMaxVars) throw OrderError("jet layout: vars must lie in [1, 16]");
  if (order < 0 || order > kMaxOrder) throw OrderError("jet layout: order must lie in [0, 15]");
  return std::shared_ptr<const JetLayout>(new JetLayout(vars, order));
}

std::uint64_t JetLayout::key(std::span<const std::uint8_t> e) const {
  std::uint64_t k = 0;
  for (auto v : e) k = (k << 4) | v;
  return k;
}

JetLayout::JetLayout(int vars, int order) : vars_(vars), order_(order) {
  if (order > 0) lower_ = make(vars, order - 1);

  // Degree-major enumeration; within a degree the order does not depend on
  // `order`, so the monomials of lower() form a prefix.
  std::vector<std::uint8_t> current(static_cast<std::size_t>(vars), 0);
  std::function<void(int, int, int)> emit = [&](int pos, int remaining, int degree) {
    if (pos == vars - 1) {
      current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(remaining);
      index_.emplace(key(current), static_cast<std::uint32_t>(degrees_.size()));
      exponents_.insert(exponents_.end(), current.begin(), current.end());
      degrees_.push_back(degree);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(a);
      emit(pos + 1, remaining - a, degree);
    }
  };
  for (int d = 0; d <= order; ++d) emit(0, d, d);

  const std::size_t n = degrees_.size();
  std::vector<std::uint8_t> sum(static_cast<std::size_t>(vars));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = exponents(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (degrees_[i] + degrees_[j] > order) continue;
      const auto ej = exponents(j);
      for (int v = 0; v < vars; ++v) sum[static_cast<std::size_t>(v)] = ei[v] + ej[v];
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), index_.at(key(sum))});
    }
  }

  if (lower_) {
    derivative_maps_.resize(static_cast<std::size_t>(vars));
    for (int v = 0; v < vars; ++v) {
      auto& map = derivative_maps_[static_cast<std::size_t>(v)];
      map.reserve(lower_->size());
      for (std::size_t m = 0; m < lower_->size(); ++m) {
        const auto em = exponents(m);
        std::copy(em.begin(), em.end(), sum.begin());
        sum[static_cast<std::size_t>(v)] += 1;
        map.push_back({index_.at(key(sum)), static_cast<double>(sum[static_cast<std::size_t>(v)])});
      }
    }
  }
}

std::ptrdiff_t JetLayout::index_of(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != vars_) return -1;
  int degree = 0;
  std::vector<std::uint8_t> e;
  e.reserve(alpha.size());
  for (int a : alpha) {
    if (a < 0) return -1;
    degree += a;
    e.push_back(static_cast<std::uint8_t>(a));
  }
  if (degree > order_) return -1;
  return static_cast<std::ptrdiff_t>(index_.at(key(e)));
}

}  // namespace finsq
