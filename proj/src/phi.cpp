#include "finsq/phi.hpp"

#include <array>

#include "finsq/differentiation.hpp"

namespace finsq {

PhiPartials phi_partials(const PhiFunction& phi, double b2, double s) {
  const auto v = seed(Eigen::Vector2d(b2, s), Eigen::MatrixXd::Identity(2, 2), 2);
  const Jet1 p = phi.value(v[0], v[1]);
  PhiPartials out;
  out.phi = p.value();
  auto at = [&](int i, int j) {
    const std::array<int, 2> alpha{i, j};
    return partial(p, alpha);
  };
  out.d1 = at(1, 0);
  out.d2 = at(0, 1);
  out.d11 = at(2, 0);
  out.d12 = at(1, 1);
  out.d22 = at(0, 2);
  return out;
}

}  // namespace finsq
