#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "fch/profile.hpp"

namespace fch {

/// Eigenvalue/eigenvector of a discretized linearized operator, normalized
/// to unit norm under the operator's measure.
struct EigenPair {
  double lambda = 0.0;
  std::vector<double> psi;        // values at the operator's active nodes
  double norm_sq = 0.0;           // ||psi||^2 under the measure (== 1 after normalization)
  double dpsi_norm_sq = 0.0;      // ||psi'||^2 under the measure
};

/// Discretization of L_{b,0} = dz^2 - W''(phi_b) on the mirrored line, or of
/// L_{f,m} = dR^2 + (1/R) dR - m^2/R^2 - W''(phi_f) on the truncated radial
/// domain.  Interior ("active") nodes only; the truncation boundary carries a
/// homogeneous Dirichlet condition and the radial origin is folded in by
/// parity (m = 0: even interpolation; m >= 1: psi(0) = 0).
///
/// Stored as the symmetric bilinear form B together with positive measure
/// weights w, so that the operator action is A = W^{-1} B and
/// <A f, g>_w = <f, A g>_w holds to rounding.
struct DiscreteOperator {
  explicit DiscreteOperator(EquilibriumProfile p) : profile(std::move(p)) {}

  Morphology morphology = Morphology::bilayer;
  int azimuthal_index = 0;
  std::vector<double> coord;            // active node coordinates (z or R)
  std::vector<double> measure_weights;  // positive; dz-type or R dR-type
  Eigen::SparseMatrix<double> form;     // symmetric weighted form, banded
  std::vector<double> profile_values;   // phi at active nodes
  std::vector<double> profile_slope;    // phi' at active nodes
  EquilibriumProfile profile;           // source profile (half-line / radial grid)

  int size() const { return static_cast<int>(coord.size()); }
  std::vector<double> apply(std::span<const double> f) const;
  double inner(std::span<const double> f, std::span<const double> g) const;

  /// max_{random f,g} style self-adjointness defect for a given pair.
  double symmetry_defect(std::span<const double> f, std::span<const double> g) const;
};

DiscreteOperator assemble_bilayer_operator(const EquilibriumProfile& p);
DiscreteOperator assemble_filament_operator(const EquilibriumProfile& p, int m);

/// The `k` eigenpairs of largest eigenvalue, descending.
std::vector<EigenPair> top_eigenpairs(const DiscreteOperator& A, int k);

/// Largest eigenvalue and eigenvector, sign-fixed so the extremal component
/// is positive, with norms under the operator's measure.
EigenPair ground_state(const DiscreteOperator& A);

/// Phi_j = A^{-j} 1 with far-field value -1/alpha_- (j = 1) or +1/alpha_-^2
/// (j = 2), returned at the operator's active nodes.  The bilayer solve is
/// restricted to the even subspace (half-line, zero slope at z = 0), which
/// removes the translational kernel exactly.
std::vector<double> solve_phi(const DiscreteOperator& A, int j);

}  // namespace fch
