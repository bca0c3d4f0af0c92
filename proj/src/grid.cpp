#include "fch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fch {

GridSpec::GridSpec(double L, int n, Geometry geom)
    : half_length(L), n_points(n), geometry(geom) {
  if (!(L > 0.0)) throw std::invalid_argument("GridSpec: half_length must be positive");
  if (n < 64) throw std::invalid_argument("GridSpec: n_points must be >= 64");
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> z(n_points);
  const double h = spacing();
  for (int i = 0; i < n_points; ++i) z[i] = i * h;
  return z;
}

double GridSpec::default_half_length(double alpha_minus) {
  return std::max(20.0, 12.0 / std::sqrt(alpha_minus));
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

std::vector<double> gregory_weights(int n, double h) {
  if (n < 8) throw std::invalid_argument("gregory_weights: need at least 8 nodes");
  std::vector<double> w(n, h);
  const double e0 = 3.0 / 8.0, e1 = 7.0 / 6.0, e2 = 23.0 / 24.0;
  w[0] = e0 * h;
  w[1] = e1 * h;
  w[2] = e2 * h;
  w[n - 1] = e0 * h;
  w[n - 2] = e1 * h;
  w[n - 3] = e2 * h;
  return w;
}

double radial_integral(std::span<const double> f, const GridSpec& g) {
  const int n = g.n_points;
  const double h = g.spacing();
  auto w = gregory_weights(n, h);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += w[i] * f[i] * g.node(i);
  return s;
}

std::vector<double> derivative4(std::span<const double> f, double h, bool even_at_left) {
  const int n = static_cast<int>(f.size());
  if (n < 6) throw std::invalid_argument("derivative4: need at least 6 nodes");
  std::vector<double> d(n);
  auto at = [&](int i) {
    if (i >= 0) return f[i];
    return even_at_left ? f[-i] : 0.0;  // only queried when even_at_left
  };
  const int lo = even_at_left ? 0 : 2;
  for (int i = lo; i < n - 2; ++i) {
    d[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
  }
  if (!even_at_left) {
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
  }
  d[n - 2] = (f[n - 5] - 6.0 * f[n - 4] + 18.0 * f[n - 3] - 10.0 * f[n - 2] - 3.0 * f[n - 1]) / (-12.0 * h);
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
  return d;
}

}  // namespace fch
