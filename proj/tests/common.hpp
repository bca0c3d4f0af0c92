#pragma once

// Shared fixtures: profiles and coefficient sets are memoized per test binary
// so repeated sections do not redo the Newton/eigen solves.

#include <map>

#include "fch/coefficients.hpp"
#include "fch/profile.hpp"

namespace fch::testing {

inline const EquilibriumProfile& bilayer_profile(double xi = -0.5) {
  static std::map<double, EquilibriumProfile> cache;
  auto it = cache.find(xi);
  if (it == cache.end()) {
    WellParams w(xi);
    it = cache.emplace(xi, solve_bilayer(w, default_grid(w, Geometry::line))).first;
  }
  return it->second;
}

inline const EquilibriumProfile& filament_profile(double xi = -0.5) {
  static std::map<double, EquilibriumProfile> cache;
  auto it = cache.find(xi);
  if (it == cache.end()) {
    WellParams w(xi);
    it = cache.emplace(xi, solve_filament(w, default_grid(w, Geometry::radial))).first;
  }
  return it->second;
}

inline const BilayerCoefficients& bilayer_coeffs(double xi = -0.5) {
  static std::map<double, BilayerCoefficients> cache;
  auto it = cache.find(xi);
  if (it == cache.end()) {
    WellParams w(xi);
    it = cache.emplace(xi, bilayer_coefficients(w, default_grid(w, Geometry::line))).first;
  }
  return it->second;
}

inline const FilamentCoefficients& filament_coeffs(double xi = -0.5) {
  static std::map<double, FilamentCoefficients> cache;
  auto it = cache.find(xi);
  if (it == cache.end()) {
    WellParams w(xi);
    it = cache.emplace(xi, filament_coefficients(w, default_grid(w, Geometry::radial))).first;
  }
  return it->second;
}

}  // namespace fch::testing
