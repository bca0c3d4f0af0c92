#include "fch/bifurcation.hpp"

#include <cmath>
#include <stdexcept>

namespace fch {

namespace {

Stability side(double expr, double tol) {
  if (expr < -tol) return Stability::stable;
  if (expr > tol) return Stability::unstable;
  return Stability::marginal;
}

}  // namespace

char stability_code(Stability s) {
  switch (s) {
    case Stability::stable: return 'S';
    case Stability::unstable: return 'U';
    default: return 'M';
  }
}

RegionFlags classify(const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                     const ModelParams& mp, double mu1, double tol) {
  const double d_bp = mu1 * bc.S_b + mp.eta_d * bc.lambda_b0 * bc.psi_b0_norm_sq;
  const double d_fp = mu1 * fc.S_f +
                      mp.eta_d * (fc.dpsi_f00_norm_sq + fc.lambda_f00 * fc.psi_f00_norm_sq);
  RegionFlags r;
  r.bilayer_pearling = side(d_bp, tol);
  r.filament_pearling = side(d_fp, tol);
  r.bilayer_fingering = side(mu1 - bc.mu_b_star(mp), tol);
  r.filament_fingering = side(mu1 - fc.mu_f_star(mp), tol);
  return r;
}

ThresholdLines threshold_lines(const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                               double eta1) {
  ThresholdLines t;
  t.pearling_degenerate_b = bc.S_b == 0.0;
  t.pearling_degenerate_f = fc.S_f == 0.0;
  if (!t.pearling_degenerate_b) {
    t.sign_S_b = bc.S_b > 0.0 ? 1 : -1;
    t.slope_b = bc.lambda_b0 * bc.psi_b0_norm_sq / std::abs(bc.S_b);
  }
  if (!t.pearling_degenerate_f) {
    t.sign_S_f = fc.S_f > 0.0 ? 1 : -1;
    t.slope_f = (fc.dpsi_f00_norm_sq + fc.lambda_f00 * fc.psi_f00_norm_sq) / std::abs(fc.S_f);
  }
  // mu_b*(eta_d) = -1/2 (2 eta1 - eta_d) sigma_b / m_b at eta2 = eta1 - eta_d
  t.fingering_b_intercept = -eta1 * bc.sigma_b / bc.m_b;
  t.fingering_b_slope = 0.5 * bc.sigma_b / bc.m_b;
  t.fingering_f_level = eta1 * fc.sigma_f / (2.0 * fc.m_f);
  return t;
}

std::vector<DiagramRow> diagram(const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                                double eta1, const std::vector<double>& eta_d_grid,
                                const std::vector<double>& mu1_grid, double tol) {
  if (eta_d_grid.empty() || mu1_grid.empty()) {
    throw std::invalid_argument("diagram: grids must be nonempty");
  }
  std::vector<DiagramRow> rows;
  rows.reserve(eta_d_grid.size() * mu1_grid.size());
  for (double eta_d : eta_d_grid) {
    const ModelParams mp = ModelParams::make(0.03, eta1, eta1 - eta_d, 1.0);
    for (double mu1 : mu1_grid) {
      DiagramRow row;
      row.eta_d = eta_d;
      row.mu1 = mu1;
      row.flags = classify(bc, fc, mp, mu1, tol);
      row.d_bp = mu1 * bc.S_b + eta_d * bc.lambda_b0 * bc.psi_b0_norm_sq;
      row.d_fp = mu1 * fc.S_f +
                 eta_d * (fc.dpsi_f00_norm_sq + fc.lambda_f00 * fc.psi_f00_norm_sq);
      row.d_bf = mu1 - bc.mu_b_star(mp);
      row.d_ff = mu1 - fc.mu_f_star(mp);
      rows.push_back(row);
    }
  }
  return rows;
}

InvariantInterval invariant_interval(const BilayerCoefficients& bc,
                                     const FilamentCoefficients& fc, const ModelParams& mp) {
  const double mb = bc.mu_b_star(mp);
  const double mf = fc.mu_f_star(mp);
  InvariantInterval iv;
  iv.mu_lo = std::min(mb, mf);
  iv.mu_hi = std::max(mb, mf);
  if (mb == mf) {
    iv.favored = Favored::coexistence;
  } else {
    iv.favored = mb < mf ? Favored::bilayer : Favored::filament;
  }
  return iv;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: need at least one point");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace fch
