#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fch/grid.hpp"
#include "fch/well.hpp"

namespace fch {

enum class Morphology { bilayer, filament };

struct SolverOptions {
  double tol = 1e-10;        // Newton residual tolerance (max norm)
  int max_iter = 60;
  int max_damping = 30;     // halvings per line search
};

struct SolverDiagnostics {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

/// Raised when Newton fails to converge; carries the final residual.
struct SolveFailure : std::runtime_error {
  SolveFailure(const std::string& what, SolverDiagnostics d)
      : std::runtime_error(what), diagnostics(d) {}
  SolverDiagnostics diagnostics;
};

/// A converged equilibrium profile on a truncated half-line or radial grid.
struct EquilibriumProfile {
  GridSpec grid;
  std::vector<double> values;      // phi at nodes
  std::vector<double> derivative;  // phi' at nodes (4th-order differences)
  Morphology morphology = Morphology::bilayer;
  double residual_norm = 0.0;
  WellParams well;

  double max_value() const;

  /// Least-squares fit of the exponential tail decay rate on [L/2, 3L/4].
  double decay_rate_fit() const;
};

/// Bilayer profile: phi'' = W'(phi) on [0, L], phi'(0) = 0, homoclinic to
/// b_-.  Requires xi < 0.
EquilibriumProfile solve_bilayer(const WellParams& w, const GridSpec& g,
                                 const SolverOptions& opts = {});

/// Filament profile: phi'' + phi'/R = W'(phi) on [0, L], phi'(0) = 0,
/// phi -> b_- as R -> infinity.
EquilibriumProfile solve_filament(const WellParams& w, const GridSpec& g,
                                  const SolverOptions& opts = {});

/// Max-norm of the discrete ODE residual of a stored profile, re-evaluated
/// from scratch on its grid.
double profile_residual(const EquilibriumProfile& p);

}  // namespace fch
