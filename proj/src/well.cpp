#include "fch/well.hpp"

#include <cmath>

namespace fch {

WellParams::WellParams(double xi) : xi_(xi) {
  if (!(xi > -2.0)) {
    throw std::domain_error("WellParams: xi <= -2 gives alpha_- <= 0");
  }
  // Expansion of 1/4 (u^2-1)^2 - xi/6 (u+1)^2 (u-2).
  c_ = {0.25 + xi / 3.0, 0.5 * xi, -0.5, -xi / 6.0, 0.25};
}

double WellParams::eval(double u) const {
  return c_[0] + u * (c_[1] + u * (c_[2] + u * (c_[3] + u * c_[4])));
}

double WellParams::derivative(double u, int order) const {
  switch (order) {
    case 1:
      return c_[1] + u * (2.0 * c_[2] + u * (3.0 * c_[3] + u * 4.0 * c_[4]));
    case 2:
      return 2.0 * c_[2] + u * (6.0 * c_[3] + u * 12.0 * c_[4]);
    case 3:
      return 6.0 * c_[3] + u * 24.0 * c_[4];
    case 4:
      return 24.0 * c_[4];
    default:
      throw std::invalid_argument("WellParams::derivative: order must be 1..4");
  }
}

double WellParams::positive_zero() const {
  // Nontrivial zeros solve the bracket quadratic
  //   u^2 - 2(1 + xi/3) u + (1 + 4 xi/3) = 0,
  // with discriminant/4 = xi^2/9 - 2 xi/3, positive only for xi < 0.
  const double disc = xi_ * xi_ / 9.0 - 2.0 * xi_ / 3.0;
  if (!(xi_ < 0.0) || disc <= 0.0) {
    throw NoHomoclinicError("well_positive_zero: no homoclinic turning point (xi >= 0)");
  }
  return (1.0 + xi_ / 3.0) - std::sqrt(disc);
}

}  // namespace fch
