#pragma once

#include <optional>
#include <vector>

#include "fch/bifurcation.hpp"

namespace fch {

enum class ClosureMode { constraint, paper_ode };

struct ExtinctionEvent {
  int index = 0;      // position in the initial radius list
  double tau = 0.0;
  bool sphere = true;
};

/// Radii of the active spheres and hoops plus the far-field chemical
/// potential at one slow time tau.  Extinct members keep their slot with
/// radius zero.
struct HybridState {
  double tau = 0.0;
  std::vector<double> sphere_radii;
  std::vector<double> hoop_radii;
  double mu1 = 0.0;
  std::vector<ExtinctionEvent> extinct;
};

struct StateRate {
  std::vector<double> sphere_rates;
  std::vector<double> hoop_rates;
  double mu1_rate = 0.0;
};

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double r_min = 0.3;       // 10 * epsilon by default; set by make()
  double max_step = 1e100;
};

struct DynamicsConfig {
  ModelParams model;
  std::vector<double> spheres;
  std::vector<double> hoops;
  std::optional<double> mu1_init;
  std::optional<double> mass_hat;  // exactly one of mu1_init / mass_hat
  ClosureMode mode = ClosureMode::constraint;
  IntegratorOptions integrator;
  double tau_final = 10.0;
  std::vector<double> output_times;

  void validate() const;
};

struct TrajectorySample {
  double tau = 0.0;
  double mu1 = 0.0;
  double mass_hat = 0.0;
  std::vector<double> spheres;  // full slots, extinct entries zero
  std::vector<double> hoops;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<ExtinctionEvent> events;
  HybridState final_state;
};

/// Time derivative of the reduced competition system.  In paper_ode mode the
/// printed mu1 equation is evaluated verbatim; in constraint mode mu1 is
/// algebraic and its rate is reported as zero.
StateRate rhs(const HybridState& s, const DynamicsConfig& cfg,
              const BilayerCoefficients& bc, const FilamentCoefficients& fc);

/// mu1 recovered from the conserved scaled mass M_hat through the leading
/// order mass constraint.
double mu1_from_mass(const HybridState& s, const DynamicsConfig& cfg,
                     const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                     double mass_hat);

/// Leading-order scaled total mass of the current state.
double mass_total(const HybridState& s, const DynamicsConfig& cfg,
                  const BilayerCoefficients& bc, const FilamentCoefficients& fc);

/// Adaptive embedded Runge-Kutta integration with extinction events: each
/// radius crossing r_min is located by bisection on the dense output, the
/// member is removed and logged, and in constraint mode mu1 is recomputed
/// algebraically from the initial M_hat.
Trajectory evolve(const DynamicsConfig& cfg, const BilayerCoefficients& bc,
                  const FilamentCoefficients& fc);

}  // namespace fch
