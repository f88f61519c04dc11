#pragma once

// Profile functions of (alpha, beta)-metrics F = alpha * phi(b^2, s), s = beta / alpha.
// A plain profile ignores its first argument.

#include <memory>
#include <string>

#include "finsq/types.hpp"

namespace finsq {

enum class PhiKind { plain, general };

class PhiFunction {
 public:
  virtual ~PhiFunction() = default;

  virtual std::string name() const = 0;
  virtual PhiKind kind() const = 0;
  /// Whether (b2, s) lies where phi is smooth and positive.
  virtual bool in_domain(double b2, double s) const = 0;

  virtual double value(double b2, double s) const = 0;
  virtual Jet1 value(const Jet1& b2, const Jet1& s) const = 0;
  virtual Jet2 value(const Jet2& b2, const Jet2& s) const = 0;
};

using PhiPtr = std::shared_ptr<const PhiFunction>;

template <class Derived>
class PhiImpl : public PhiFunction {
 public:
  double value(double b2, double s) const final { return self().template eval<double>(b2, s); }
  Jet1 value(const Jet1& b2, const Jet1& s) const final { return self().template eval<Jet1>(b2, s); }
  Jet2 value(const Jet2& b2, const Jet2& s) const final { return self().template eval<Jet2>(b2, s); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// phi and its partials; index 1 is b^2, index 2 is s. For plain kinds phi' = d2 and phi'' = d22.
struct PhiPartials {
  double phi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;
};

PhiPartials phi_partials(const PhiFunction& phi, double b2, double s);

/// phi = 1.
class RiemannianPhi final : public PhiImpl<RiemannianPhi> {
 public:
  std::string name() const override { return "riemannian"; }
  PhiKind kind() const override { return PhiKind::plain; }
  bool in_domain(double, double) const override { return true; }
  template <class S>
  S eval(const S&, const S&) const {
    return S(1.0);
  }
};

/// phi = 1 + s.
class RandersPhi final : public PhiImpl<RandersPhi> {
 public:
  std::string name() const override { return "randers"; }
  PhiKind kind() const override { return PhiKind::plain; }
  bool in_domain(double b2, double s) const override { return b2 < 1.0 && 1.0 + s > 0.0; }
  template <class S>
  S eval(const S&, const S& s) const {
    return 1.0 + s;
  }
};

/// phi = (1 + s)^2.
class SquarePhi final : public PhiImpl<SquarePhi> {
 public:
  std::string name() const override { return "square"; }
  PhiKind kind() const override { return PhiKind::plain; }
  bool in_domain(double b2, double s) const override { return b2 < 1.0 && 1.0 + s > 0.0; }
  template <class S>
  S eval(const S&, const S& s) const {
    const S t = 1.0 + s;
    return t * t;
  }
};

/// phi(b^2, s) = (sqrt(1 + b^2) + s)^2.
class SquareTildePhi final : public PhiImpl<SquareTildePhi> {
 public:
  std::string name() const override { return "square-tilde"; }
  PhiKind kind() const override { return PhiKind::general; }
  bool in_domain(double b2, double s) const override { return b2 >= 0.0 && std::sqrt(1.0 + b2) + s > 0.0; }
  template <class S>
  S eval(const S& b2, const S& s) const {
    using std::sqrt;
    const S t = sqrt(1.0 + b2) + s;
    return t * t;
  }
};

/// phi(b^2, s) = (sqrt(1 - b^2 + s^2) + s)^2 / ((1 - b^2)^2 sqrt(1 - b^2 + s^2)).
class SquareBarPhi final : public PhiImpl<SquareBarPhi> {
 public:
  std::string name() const override { return "square-bar"; }
  PhiKind kind() const override { return PhiKind::general; }
  bool in_domain(double b2, double s) const override { return b2 >= 0.0 && b2 < 1.0 && s * s <= b2 + 1e-12; }
  template <class S>
  S eval(const S& b2, const S& s) const {
    using std::sqrt;
    const S q = 1.0 - b2;
    const S root = sqrt(q + s * s);
    const S t = root + s;
    return t * t / (q * q * root);
  }
};

/// Randers metric in navigation form: phi(b^2, s) = sqrt(1 - b^2 + s^2) / (1 - b^2) - s / (1 - b^2).
class RandersNavPhi final : public PhiImpl<RandersNavPhi> {
 public:
  std::string name() const override { return "randers-nav"; }
  PhiKind kind() const override { return PhiKind::general; }
  bool in_domain(double b2, double s) const override { return b2 >= 0.0 && b2 < 1.0 && s * s <= b2 + 1e-12; }
  template <class S>
  S eval(const S& b2, const S& s) const {
    using std::sqrt;
    const S q = 1.0 - b2;
    return (sqrt(q + s * s) - s) / q;
  }
};

}  // namespace finsq
