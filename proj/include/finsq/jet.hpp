#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet<T> stores the Taylor coefficients of a scalar quantity in `vars`
// perturbation directions up to total degree `order`. T may itself be a Jet,
// which gives anisotropic truncation: Jet<Jet<double>> with an outer layout
// over base-point directions and an inner layout over fiber directions.
//
// Jets without a layout are constants and broadcast against any layout.
// Mixing two different layouts is an error, never a silent truncation.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace finsq {

class OrderError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };
  struct DerivativeEntry {
    std::uint32_t source;
    double factor;
  };

  static constexpr int kMaxVars = 16;
  static constexpr int kMaxOrder = 15;

  static std::shared_ptr<const JetLayout> make(int vars, int order);

  int vars() const noexcept { return vars_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return degrees_.size(); }
  int degree(std::size_t k) const { return degrees_[k]; }
  std::span<const std::uint8_t> exponents(std::size_t k) const {
    return {exponents_.data() + k * static_cast<std::size_t>(vars_), static_cast<std::size_t>(vars_)};
  }

  /// Position of the monomial with the given exponents, or -1 when its degree exceeds the order.
  std::ptrdiff_t index_of(std::span<const int> alpha) const;

  std::span<const Product> products() const { return products_; }

  /// Layout of order - 1; its monomials are a prefix of this layout's. Null at order 0.
  const std::shared_ptr<const JetLayout>& lower() const { return lower_; }

  /// For each monomial m of lower(): where m + e_var sits here, and the factor m_var + 1.
  std::span<const DerivativeEntry> derivative_map(int var) const { return derivative_maps_.at(var); }

  bool same_shape(const JetLayout& other) const noexcept {
    return vars_ == other.vars_ && order_ == other.order_;
  }

 private:
  JetLayout(int vars, int order);

  std::uint64_t key(std::span<const std::uint8_t> e) const;

  int vars_;
  int order_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degrees_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<Product> products_;
  std::vector<std::vector<DerivativeEntry>> derivative_maps_;
  std::shared_ptr<const JetLayout> lower_;
};

using LayoutPtr = std::shared_ptr<const JetLayout>;

template <class T>
class Jet;

template <class T>
struct is_jet : std::false_type {};
template <class T>
struct is_jet<Jet<T>> : std::true_type {};
template <class T>
inline constexpr bool is_jet_v = is_jet<T>::value;

template <class T>
class Jet {
 public:
  using value_type = T;

  Jet() : coeffs_(1, T(0.0)) {}
  Jet(double v) : coeffs_(1, T(v)) {}  // NOLINT: constants convert implicitly
  template <class U = T>
    requires(!std::is_same_v<U, double>)
  Jet(const T& v) : coeffs_(1, v) {}  // NOLINT

  Jet(LayoutPtr layout, std::vector<T> coeffs) : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {
    if (!layout_ || coeffs_.size() != layout_->size()) {
      throw std::invalid_argument("jet: coefficient count does not match layout");
    }
  }

  /// The jet of a coordinate: `value` plus a unit perturbation in direction `var`.
  static Jet variable(const LayoutPtr& layout, const T& value, int var) {
    std::vector<T> c(layout->size(), T(0.0));
    c[0] = value;
    if (layout->order() >= 1) {
      c[1 + static_cast<std::size_t>(var)] = T(1.0);
    }
    return Jet(layout, std::move(c));
  }

  const T& value() const noexcept { return coeffs_[0]; }
  T& value() noexcept { return coeffs_[0]; }
  bool is_constant() const noexcept { return !layout_; }
  const LayoutPtr& layout() const noexcept { return layout_; }
  int order() const noexcept { return layout_ ? layout_->order() : 0; }
  int vars() const noexcept { return layout_ ? layout_->vars() : 0; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const T> coeffs() const noexcept { return coeffs_; }
  std::span<T> coeffs() noexcept { return coeffs_; }
  const T& operator[](std::size_t k) const { return coeffs_[k]; }
  T& operator[](std::size_t k) { return coeffs_[k]; }

  bool is_zero_constant() const {
    if (layout_) return false;
    if constexpr (std::is_same_v<T, double>) {
      return coeffs_[0] == 0.0;
    } else {
      return coeffs_[0].is_zero_constant();
    }
  }

  /// Give a constant jet the layout `layout`; a no-op when it already has a matching one.
  void promote(const LayoutPtr& layout) {
    if (!layout_) {
      layout_ = layout;
      coeffs_.resize(layout->size(), T(0.0));
    } else if (layout_ != layout && !layout_->same_shape(*layout)) {
      throw OrderError("jet: mixing layouts of different shape (vars " + std::to_string(layout_->vars()) +
                       ", order " + std::to_string(layout_->order()) + " vs vars " +
                       std::to_string(layout->vars()) + ", order " + std::to_string(layout->order()) + ")");
    }
  }

  Jet& operator+=(const Jet& o) {
    if (o.layout_) {
      promote(o.layout_);
      for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    } else {
      coeffs_[0] += o.coeffs_[0];
    }
    return *this;
  }

  Jet& operator-=(const Jet& o) {
    if (o.layout_) {
      promote(o.layout_);
      for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    } else {
      coeffs_[0] -= o.coeffs_[0];
    }
    return *this;
  }

  Jet& operator+=(double v) {
    coeffs_[0] += v;
    return *this;
  }
  Jet& operator-=(double v) {
    coeffs_[0] -= v;
    return *this;
  }
  Jet& operator*=(double v) {
    for (auto& c : coeffs_) c *= v;
    return *this;
  }
  Jet& operator/=(double v) { return *this *= (1.0 / v); }

  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  /// this += a * b, without materializing the product.
  void add_product(const Jet& a, const Jet& b) {
    if constexpr (is_jet_v<T>) {
      if (a.is_zero_constant() || b.is_zero_constant()) return;
    }
    const LayoutPtr* layout = nullptr;
    if (a.layout_) {
      layout = &a.layout_;
      if (b.layout_ && b.layout_ != a.layout_ && !b.layout_->same_shape(*a.layout_)) {
        throw OrderError("jet: product of jets with layouts of different shape");
      }
    } else if (b.layout_) {
      layout = &b.layout_;
    }
    if (!layout) {
      mul_add(coeffs_[0], a.coeffs_[0], b.coeffs_[0]);
      return;
    }
    promote(*layout);
    if (!a.layout_) {
      for (std::size_t k = 0; k < coeffs_.size(); ++k) mul_add(coeffs_[k], a.coeffs_[0], b.coeffs_[k]);
    } else if (!b.layout_) {
      for (std::size_t k = 0; k < coeffs_.size(); ++k) mul_add(coeffs_[k], a.coeffs_[k], b.coeffs_[0]);
    } else {
      for (const auto& p : (*layout)->products()) mul_add(coeffs_[p.out], a.coeffs_[p.lhs], b.coeffs_[p.rhs]);
    }
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.add_product(a, b);
    return r;
  }

 private:
  static void mul_add(T& acc, const T& a, const T& b) {
    if constexpr (std::is_same_v<T, double>) {
      acc += a * b;
    } else {
      acc.add_product(a, b);
    }
  }

  LayoutPtr layout_;
  std::vector<T> coeffs_;
};

using Jet1 = Jet<double>;
using Jet2 = Jet<Jet<double>>;

// ---------------------------------------------------------------------------
// value access

inline double scalar_value(double v) { return v; }
template <class T>
double scalar_value(const Jet<T>& j) {
  return scalar_value(j.value());
}

inline bool all_finite(double v) { return std::isfinite(v); }
template <class T>
bool all_finite(const Jet<T>& j) {
  for (const auto& c : j.coeffs()) {
    if (!all_finite(c)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// arithmetic

template <class T>
Jet<T> operator+(Jet<T> a, const Jet<T>& b) {
  return a += b;
}
template <class T>
Jet<T> operator-(Jet<T> a, const Jet<T>& b) {
  return a -= b;
}
template <class T>
Jet<T> operator-(Jet<T> a) {
  return a *= -1.0;
}
template <class T>
Jet<T> operator+(const Jet<T>& a) {
  return a;
}

template <class T>
Jet<T> operator+(Jet<T> a, double b) {
  return a += b;
}
template <class T>
Jet<T> operator+(double a, Jet<T> b) {
  return b += a;
}
template <class T>
Jet<T> operator-(Jet<T> a, double b) {
  return a -= b;
}
template <class T>
Jet<T> operator-(double a, Jet<T> b) {
  b *= -1.0;
  return b += a;
}
template <class T>
Jet<T> operator*(Jet<T> a, double b) {
  return a *= b;
}
template <class T>
Jet<T> operator*(double a, Jet<T> b) {
  return b *= a;
}
template <class T>
Jet<T> operator/(Jet<T> a, double b) {
  return a /= b;
}

/// Sum of f^(k)(u0)/k! h^k where h = u - u0, evaluated by Horner's rule.
template <class T>
Jet<T> compose(const Jet<T>& u, const std::vector<T>& series) {
  if (u.is_constant()) return Jet<T>(series.at(0));
  const auto order = static_cast<std::size_t>(u.order());
  if (series.size() < order + 1) throw OrderError("jet: composition series shorter than jet order");
  Jet<T> h = u;
  h.value() = T(0.0);
  Jet<T> r(series[order]);
  for (std::size_t k = order; k-- > 0;) {
    r = r * h;
    r.value() += series[k];
  }
  return r;
}

inline double reciprocal(double v) { return 1.0 / v; }

template <class T>
Jet<T> reciprocal(const Jet<T>& u) {
  const T c0 = reciprocal(u.value());
  std::vector<T> series{c0};
  for (int k = 1; k <= u.order(); ++k) series.push_back(-(series.back() * c0));
  return compose(u, series);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  if (b.is_constant()) {
    const T inv = reciprocal(b.value());
    Jet<T> r = a;
    for (auto& c : r.coeffs()) c = c * inv;
    return r;
  }
  return a * reciprocal(b);
}
template <class T>
Jet<T> operator/(double a, const Jet<T>& b) {
  return reciprocal(b) * a;
}

template <class T>
Jet<T> sqrt(const Jet<T>& u) {
  using std::sqrt;
  const T& u0 = u.value();
  std::vector<T> series{sqrt(u0)};
  if (u.order() > 0) {
    const T inv = reciprocal(u0);
    for (int k = 1; k <= u.order(); ++k) {
      series.push_back(series.back() * inv * ((0.5 - (k - 1)) / k));
    }
  }
  return compose(u, series);
}

/// Real power via the binomial series; needs a nonzero base value.
template <class T>
Jet<T> pow(const Jet<T>& u, double p) {
  using std::pow;
  const T& u0 = u.value();
  std::vector<T> series{pow(u0, p)};
  if (u.order() > 0) {
    const T inv = reciprocal(u0);
    for (int k = 1; k <= u.order(); ++k) {
      series.push_back(series.back() * inv * ((p - (k - 1)) / k));
    }
  }
  return compose(u, series);
}

/// Integer power by repeated squaring; exact at any base value.
template <class T>
Jet<T> pow(const Jet<T>& u, int n) {
  if (n < 0) return reciprocal(pow(u, -n));
  Jet<T> result(1.0);
  Jet<T> base = u;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

template <class T>
Jet<T> exp(const Jet<T>& u) {
  using std::exp;
  const T e0 = exp(u.value());
  std::vector<T> series{e0};
  for (int k = 1; k <= u.order(); ++k) series.push_back(series.back() * (1.0 / k));
  return compose(u, series);
}

template <class T>
Jet<T> log(const Jet<T>& u) {
  using std::log;
  const T& u0 = u.value();
  std::vector<T> series{log(u0)};
  if (u.order() > 0) {
    const T inv = reciprocal(u0);
    T power = inv;
    for (int k = 1; k <= u.order(); ++k) {
      series.push_back(power * ((k % 2 == 1 ? 1.0 : -1.0) / k));
      power = power * inv;
    }
  }
  return compose(u, series);
}

namespace detail {
template <class T>
std::vector<T> trig_series(const T& s0, const T& c0, int order) {
  // derivatives of sin cycle through sin, cos, -sin, -cos
  std::vector<T> series;
  double factorial = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) factorial *= k;
    switch (k % 4) {
      case 0: series.push_back(s0 * (1.0 / factorial)); break;
      case 1: series.push_back(c0 * (1.0 / factorial)); break;
      case 2: series.push_back(s0 * (-1.0 / factorial)); break;
      default: series.push_back(c0 * (-1.0 / factorial)); break;
    }
  }
  return series;
}
}  // namespace detail

template <class T>
Jet<T> sin(const Jet<T>& u) {
  using std::cos;
  using std::sin;
  return compose(u, detail::trig_series(T(sin(u.value())), T(cos(u.value())), u.order()));
}

template <class T>
Jet<T> cos(const Jet<T>& u) {
  using std::cos;
  using std::sin;
  // cos(u) = sin(u + pi/2)
  return compose(u, detail::trig_series(T(cos(u.value())), T(-sin(u.value())), u.order()));
}

// ---------------------------------------------------------------------------
// structural operations

/// Partial derivative in outer direction `var`; the result has order one less.
template <class T>
Jet<T> derivative(const Jet<T>& j, int var) {
  if (j.is_constant()) return Jet<T>(0.0);
  const auto& layout = j.layout();
  if (var < 0 || var >= layout->vars()) throw OrderError("jet: derivative direction out of range");
  if (layout->order() == 0) throw OrderError("jet: cannot differentiate an order-0 jet");
  const auto map = layout->derivative_map(var);
  std::vector<T> c;
  c.reserve(map.size());
  for (const auto& e : map) c.push_back(j[e.source] * e.factor);
  return Jet<T>(layout->lower(), std::move(c));
}

/// Drop all terms above `order`. Raising the order is an error.
template <class T>
Jet<T> truncate(const Jet<T>& j, int order) {
  if (j.is_constant() || j.order() == order) return j;
  if (order > j.order() || order < 0) {
    throw OrderError("jet: cannot truncate order " + std::to_string(j.order()) + " to " + std::to_string(order));
  }
  LayoutPtr layout = j.layout();
  while (layout->order() > order) layout = layout->lower();
  std::vector<T> c(j.coeffs().begin(), j.coeffs().begin() + static_cast<std::ptrdiff_t>(layout->size()));
  return Jet<T>(layout, std::move(c));
}

/// Apply `f` to every coefficient; used to act on the inner level of nested jets.
template <class T, class F>
auto map_coeffs(const Jet<T>& j, F&& f) {
  using U = std::invoke_result_t<F&, const T&>;
  std::vector<U> c;
  c.reserve(j.size());
  for (const auto& v : j.coeffs()) c.push_back(f(v));
  if (j.is_constant()) return Jet<U>(c.front());
  return Jet<U>(j.layout(), std::move(c));
}

/// The coefficient of the monomial `alpha` scaled to the mixed partial derivative.
template <class T>
T partial(const Jet<T>& j, std::span<const int> alpha) {
  int degree = 0;
  double factorial = 1.0;
  for (int a : alpha) {
    if (a < 0) throw OrderError("jet: negative multi-index entry");
    degree += a;
    for (int k = 2; k <= a; ++k) factorial *= k;
  }
  if (j.is_constant()) return degree == 0 ? j.value() : T(0.0);
  if (static_cast<int>(alpha.size()) != j.vars()) throw OrderError("jet: multi-index length differs from jet vars");
  if (degree > j.order()) {
    throw OrderError("jet: requested derivative of degree " + std::to_string(degree) + " exceeds jet order " +
                     std::to_string(j.order()));
  }
  const auto k = j.layout()->index_of(alpha);
  return j[static_cast<std::size_t>(k)] * factorial;
}

template <class T>
T partial(const Jet<T>& j, std::initializer_list<int> alpha) {
  return partial(j, std::span<const int>(alpha.begin(), alpha.size()));
}

}  // namespace finsq

namespace Eigen {

template <class T>
struct NumTraits<finsq::Jet<T>> : GenericNumTraits<finsq::Jet<T>> {
  using Real = finsq::Jet<T>;
  using NonInteger = finsq::Jet<T>;
  using Nested = finsq::Jet<T>;
  using Literal = finsq::Jet<T>;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = HugeCost,
    AddCost = HugeCost,
    MulCost = HugeCost
  };

  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

}  // namespace Eigen
