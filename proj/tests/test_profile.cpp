#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "fch/profile.hpp"

using namespace fch;
using fch::testing::bilayer_profile;
using fch::testing::filament_profile;

namespace {

// First-integral defect max |1/2 (phi')^2 - W(phi)|: an oracle independent of
// the collocation residual, since the conserved quantity is never imposed by
// the solver.
double first_integral_defect(const EquilibriumProfile& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    m = std::max(m, std::abs(0.5 * p.derivative[i] * p.derivative[i] -
                             p.well.eval(p.values[i])));
  }
  return m;
}

}  // namespace

TEST_CASE("bilayer: first integral, turning point, decay rate") {
  const auto& p = bilayer_profile(-0.5);
  CHECK(p.residual_norm < 1e-9);
  CHECK(profile_residual(p) < 1e-9);
  CHECK(first_integral_defect(p) < 1e-8);
  // analytic turning point (5 - sqrt(13))/6
  CHECK(p.max_value() ==
        doctest::Approx((5.0 - std::sqrt(13.0)) / 6.0).epsilon(1e-9));
  // tail decays like exp(-sqrt(alpha_-) z)
  CHECK(p.decay_rate_fit() ==
        doctest::Approx(std::sqrt(1.5)).epsilon(1e-4));
  // peak at the origin, monotone tail into b_-
  CHECK(p.values.front() == doctest::Approx(p.max_value()));
  CHECK(p.values.back() == doctest::Approx(WellParams::b_minus).epsilon(1e-8));
}

TEST_CASE("bilayer turning point matches the well zero for other tilts") {
  for (double xi : {-0.9, -0.7, -0.3}) {
    const auto& p = bilayer_profile(xi);
    WellParams w(xi);
    CHECK(p.max_value() == doctest::Approx(w.positive_zero()).epsilon(1e-8));
    CHECK(first_integral_defect(p) < 1e-8);
  }
}

TEST_CASE("filament: residual, peak above the turning point, decay") {
  const auto& p = filament_profile(-0.5);
  WellParams w(-0.5);
  CHECK(p.residual_norm < 1e-9);
  CHECK(profile_residual(p) < 1e-9);
  // the radial peak overshoots the planar turning point (curvature term
  // steals kinetic energy on the way out)
  CHECK(p.max_value() > w.positive_zero());
  CHECK(p.max_value() < WellParams::b_plus);
  CHECK(p.values.back() == doctest::Approx(WellParams::b_minus).epsilon(1e-8));
  // profile has decayed well before three quarters of the domain (guards
  // against the truncation-pinned spurious branch)
  const int tail = static_cast<int>(0.75 * (p.grid.n_points - 1));
  CHECK(std::abs(p.values[tail] - WellParams::b_minus) < 1e-3);
}

TEST_CASE("filament solves across the scan range") {
  for (double xi : {-0.9, -0.7, -0.45, -0.3}) {
    const auto& p = filament_profile(xi);
    CHECK(p.residual_norm < 1e-9);
    CHECK(p.max_value() > WellParams(xi).positive_zero());
  }
}

TEST_CASE("grid refinement leaves the profile unchanged to 1e-8") {
  const auto& p = bilayer_profile(-0.5);
  GridSpec fine(30.0, 4001, Geometry::line);
  auto pf = solve_bilayer(WellParams(-0.5), fine);
  // compare at z = 1.0: node 100 coarse (h=0.01), node 100 fine (h=0.0075)
  const double z = 3.0;
  const int ic = static_cast<int>(std::lround(z / p.grid.spacing()));
  const int jf = static_cast<int>(std::lround(z / fine.spacing()));
  REQUIRE(p.grid.node(ic) == doctest::Approx(fine.node(jf)));
  CHECK(p.values[ic] == doctest::Approx(pf.values[jf]).epsilon(1e-8));
}

TEST_CASE("solver guards") {
  GridSpec gl(20.0, 2001, Geometry::line);
  GridSpec gr(20.0, 2001, Geometry::radial);
  CHECK_THROWS_AS(solve_bilayer(WellParams(0.1), gl), NoHomoclinicError);
  CHECK_THROWS_AS(solve_bilayer(WellParams(-0.5), gr), std::invalid_argument);
  CHECK_THROWS_AS(solve_filament(WellParams(-0.5), gl), std::invalid_argument);
}
