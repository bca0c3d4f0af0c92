#pragma once

#include <array>
#include <stdexcept>

namespace fch {

/// Tilted double well W(u; xi) with wells pinned at b_- = -1 and b_+ = +1,
///   W(u) = 1/2 (u - b_-)^2 ( 1/2 (u - b_+)^2 - xi/3 (u - (3 b_+ - b_-)/2) ).
/// The tilt xi sets the depth of the right well, W(b_+) = 2 xi / 3, and the
/// left-well curvature alpha_- = W''(b_-) = 2 + xi.  The quartic is expanded
/// into monomial coefficients on construction so all derivatives are exact
/// polynomial evaluations.
class WellParams {
public:
  explicit WellParams(double xi);

  double xi() const { return xi_; }
  static constexpr double b_minus = -1.0;
  static constexpr double b_plus = 1.0;

  /// W''(b_-) = 2 + xi, positive for admissible tilts.
  double alpha_minus() const { return 2.0 + xi_; }

  double eval(double u) const;

  /// d^order W / du^order, order in 1..4.
  double derivative(double u, int order) const;

  /// Smallest root u* > b_- of W(u*) = 0; the bilayer peak amplitude by the
  /// first integral 1/2 (phi')^2 = W(phi).  Requires xi < 0.
  double positive_zero() const;

private:
  double xi_;
  std::array<double, 5> c_;  // monomial coefficients, c_[k] * u^k
};

/// Raised when xi >= 0 leaves no turning point in (b_-, b_+].
struct NoHomoclinicError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace fch
