#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fch {

enum class Geometry { line, radial };

/// Uniform truncated grid.  For line geometry the nodes cover [0, L] (the
/// half-line; profiles are mirrored to [-L, L] where needed), for radial
/// geometry they cover [0, L] with the first node at R = 0.
struct GridSpec {
  double half_length = 20.0;
  int n_points = 2001;
  Geometry geometry = Geometry::line;

  GridSpec() = default;
  GridSpec(double L, int n, Geometry geom);

  double spacing() const { return half_length / (n_points - 1); }
  double node(int i) const { return i * spacing(); }
  std::vector<double> nodes() const;

  /// Default truncation for a given left-well curvature: tail below 1e-10.
  static double default_half_length(double alpha_minus);
};

/// Trapezoid quadrature on a uniform grid (spectrally accurate for smooth
/// integrands decaying at both ends).
double trapezoid(std::span<const double> f, double h);

/// Gregory end-corrected trapezoid weights of order 4 on n uniform nodes.
/// All weights positive; used where the integrand does not vanish at an
/// endpoint (radial integrals, where g(R) R has nonzero slope at R = 0).
std::vector<double> gregory_weights(int n, double h);

/// Integral of f(R) R dR on [0, L] via Gregory weights applied to f(R)*R.
double radial_integral(std::span<const double> f, const GridSpec& g);

/// Fourth-order finite-difference derivative of nodal values on a uniform
/// grid.  `even_at_left` reflects the function smoothly through node 0
/// (appropriate for profiles with zero slope at the origin); the right
/// boundary uses one-sided stencils.
std::vector<double> derivative4(std::span<const double> f, double h, bool even_at_left);

}  // namespace fch
