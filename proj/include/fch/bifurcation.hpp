#pragma once

#include <vector>

#include "fch/coefficients.hpp"

namespace fch {

enum class Stability { stable, unstable, marginal };

char stability_code(Stability s);  // 'S', 'U', 'M'

/// Stability classification of one point of the (eta_d, mu1) plane.
struct RegionFlags {
  Stability bilayer_pearling = Stability::marginal;
  Stability filament_pearling = Stability::marginal;
  Stability bilayer_fingering = Stability::marginal;
  Stability filament_fingering = Stability::marginal;

  bool admissible() const {
    return bilayer_pearling == Stability::stable &&
           filament_pearling == Stability::stable &&
           bilayer_fingering == Stability::stable &&
           filament_fingering == Stability::stable;
  }
};

/// Closed-form boundary lines in the (eta_d, mu1) plane at fixed eta1.
/// Pearling lines pass through the origin with slope -sign(S) * c; the
/// bilayer fingering boundary is affine in eta_d (eta2 = eta1 - eta_d), the
/// filament one is constant.
struct ThresholdLines {
  int sign_S_b = 0;
  double slope_b = 0.0;  // c_b = lambda_b0 ||psi_b0||^2 / |S_b|
  int sign_S_f = 0;
  double slope_f = 0.0;  // c_f = (||psi'||^2 + lambda ||psi||^2) / |S_f|
  bool pearling_degenerate_b = false;  // S_b == 0
  bool pearling_degenerate_f = false;
  double fingering_b_intercept = 0.0;  // mu_b*(eta_d) = intercept + slope * eta_d
  double fingering_b_slope = 0.0;      //   = sigma_b/(2 m_b)
  double fingering_f_level = 0.0;      // mu_f*, independent of eta_d
};

/// One row of the bifurcation diagram sweep.
struct DiagramRow {
  double eta_d = 0.0;
  double mu1 = 0.0;
  RegionFlags flags;
  double d_bp = 0.0;  // signed threshold expressions (stable side negative)
  double d_fp = 0.0;
  double d_bf = 0.0;
  double d_ff = 0.0;
};

/// Evaluate the four stability conditions at (mp.eta_d, mu1).  Marginal is
/// assigned when the defining expression lies within tol of zero.
RegionFlags classify(const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                     const ModelParams& mp, double mu1, double tol = 1e-9);

ThresholdLines threshold_lines(const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                               double eta1);

/// Row-major sweep over eta_d x mu1 grids at fixed eta1.
std::vector<DiagramRow> diagram(const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                                double eta1, const std::vector<double>& eta_d_grid,
                                const std::vector<double>& mu1_grid, double tol = 1e-9);

enum class Favored { bilayer, filament, coexistence };

struct InvariantInterval {
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  Favored favored = Favored::coexistence;
};

/// The attracting, forward-invariant interval [min(mu_b*, mu_f*),
/// max(mu_b*, mu_f*)]; the morphology with the smaller equilibrium value is
/// dynamically favored.
InvariantInterval invariant_interval(const BilayerCoefficients& bc,
                                     const FilamentCoefficients& fc, const ModelParams& mp);

/// Helper: a:b:n style inclusive linspace.
std::vector<double> linspace(double a, double b, int n);

}  // namespace fch
