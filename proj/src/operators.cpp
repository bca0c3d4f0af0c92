#include "fch/operators.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fch {

namespace {

constexpr double kC2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};  // /(12 h^2)
constexpr double kC1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};      // /(12 h)

// Even interpolation of the origin value from the first three radial nodes,
// exact to O(h^6) for smooth even functions of R.
constexpr double kOrigin[3] = {1.5, -0.6, 0.1};

Eigen::SparseMatrix<double> symmetrize_form(
    const std::vector<Eigen::Triplet<double>>& a_trip,
    const std::vector<double>& w, int n) {
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(a_trip.begin(), a_trip.end());
  Eigen::SparseMatrix<double> WA = Eigen::VectorXd::Map(w.data(), n).asDiagonal() * A;
  Eigen::SparseMatrix<double> B = 0.5 * (WA + Eigen::SparseMatrix<double>(WA.transpose()));
  B.makeCompressed();
  return B;
}

}  // namespace

std::vector<double> DiscreteOperator::apply(std::span<const double> f) const {
  const int n = size();
  Eigen::VectorXd bf = form * Eigen::Map<const Eigen::VectorXd>(f.data(), n);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = bf[i] / measure_weights[i];
  return out;
}

double DiscreteOperator::inner(std::span<const double> f, std::span<const double> g) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += measure_weights[i] * f[i] * g[i];
  return s;
}

double DiscreteOperator::symmetry_defect(std::span<const double> f,
                                         std::span<const double> g) const {
  auto af = apply(f);
  auto ag = apply(g);
  return std::abs(inner(af, g) - inner(f, ag));
}

DiscreteOperator assemble_bilayer_operator(const EquilibriumProfile& p) {
  if (p.morphology != Morphology::bilayer) {
    throw std::invalid_argument("assemble_bilayer_operator: bilayer profile required");
  }
  const int nh = p.grid.n_points;       // half-line nodes
  const int nfull = 2 * nh - 1;         // mirrored line
  const int n = nfull - 2;              // active: Dirichlet ends dropped
  const double h = p.grid.spacing();

  auto phi_at = [&](int j) { return p.values[std::abs(j - (nh - 1))]; };

  DiscreteOperator op(p);
  op.morphology = Morphology::bilayer;
  op.coord.resize(n);
  op.measure_weights.assign(n, h);
  op.profile_values.resize(n);
  op.profile_slope.resize(n);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(6 * n);
  for (int row = 0; row < n; ++row) {
    const int j = row + 1;  // full-grid index
    op.coord[row] = (j - (nh - 1)) * h;
    op.profile_values[row] = phi_at(j);
    const int src = j - (nh - 1);
    op.profile_slope[row] = (src >= 0 ? p.derivative[src] : -p.derivative[-src]);
    for (int k = -2; k <= 2; ++k) {
      const int q = j + k;
      if (q < 1 || q > nfull - 2) continue;  // Dirichlet at and beyond the ends
      double v = kC2[k + 2] / (12.0 * h * h);
      if (k == 0) v -= p.well.derivative(phi_at(j), 2);
      trip.emplace_back(row, q - 1, v);
    }
  }
  op.form = symmetrize_form(trip, op.measure_weights, n);
  return op;
}

DiscreteOperator assemble_filament_operator(const EquilibriumProfile& p, int m) {
  if (p.morphology != Morphology::filament) {
    throw std::invalid_argument("assemble_filament_operator: filament profile required");
  }
  if (m < 0) throw std::invalid_argument("assemble_filament_operator: m must be >= 0");
  const int nr = p.grid.n_points;
  const int n = nr - 2;  // active nodes R = h .. L-h
  const double h = p.grid.spacing();
  const double parity = (m % 2 == 0) ? 1.0 : -1.0;

  DiscreteOperator op(p);
  op.morphology = Morphology::filament;
  op.azimuthal_index = m;
  op.coord.resize(n);
  op.measure_weights.resize(n);
  op.profile_values.resize(n);
  op.profile_slope.resize(n);
  auto greg = gregory_weights(nr, h);
  for (int row = 0; row < n; ++row) {
    const int i = row + 1;
    op.coord[row] = i * h;
    op.measure_weights[row] = greg[i] * (i * h);
    op.profile_values[row] = p.values[i];
    op.profile_slope[row] = p.derivative[i];
  }

  // Variational assembly: the bilinear form of the operator,
  //   B(psi, chi) = -int (psi' chi' + (m^2/R^2 + W''(phi)) psi chi) R dR,
  // is discretized as B = -(D^T Wq D + diag(wq * potential)) with D the
  // fourth-order differentiation matrix (parity fold at the origin,
  // one-sided stencils at the truncation) and Wq the Gregory R dR weights.
  // This is symmetric by construction and, unlike symmetrizing the strong
  // stencil, it stays consistent at the origin, where the strong origin
  // equation carries zero measure weight and would otherwise be lost.
  const int nq = nr;       // quadrature nodes 0 .. nr-1
  const int nu = nr - 1;   // unknowns 0 .. nr-2; Dirichlet at nr-1
  std::vector<Eigen::Triplet<double>> dtrip;
  dtrip.reserve(5 * nq);
  auto dput = [&](int row, int q, double v) {
    if (q < 0) {  // parity reflection through the origin
      q = -q;
      v *= parity;
    }
    if (q > nu - 1) return;  // Dirichlet value, identically zero
    dtrip.emplace_back(row, q, v);
  };
  // one-sided 4th-order first-derivative stencils for the last two rows
  constexpr double kEnd1[5] = {3.0, -16.0, 36.0, -48.0, 25.0};   // at the last node
  constexpr double kEnd2[5] = {-1.0, 6.0, -18.0, 10.0, 3.0};     // one in from the end
  for (int row = 0; row < nq; ++row) {
    if (row >= nq - 2) {
      const double* s = (row == nq - 1) ? kEnd1 : kEnd2;
      for (int t = 0; t < 5; ++t) dput(row, nq - 5 + t, s[t] / (12.0 * h));
    } else {
      for (int k = -2; k <= 2; ++k) dput(row, row + k, kC1[k + 2] / (12.0 * h));
    }
  }
  Eigen::SparseMatrix<double> D(nq, nu);
  D.setFromTriplets(dtrip.begin(), dtrip.end());
  Eigen::VectorXd wq(nq);
  for (int q = 0; q < nq; ++q) wq[q] = greg[q] * (q * h);
  Eigen::SparseMatrix<double> Bfull = -Eigen::SparseMatrix<double>(
      D.transpose() * wq.asDiagonal() * D);
  std::vector<Eigen::Triplet<double>> ptrip;
  for (int q = 1; q < nu; ++q) {
    const double R = q * h;
    const double pot = static_cast<double>(m) * m / (R * R) +
                       p.well.derivative(p.values[q], 2);
    ptrip.emplace_back(q, q, -wq[q] * pot);
  }
  {
    Eigen::SparseMatrix<double> Pot(nu, nu);
    Pot.setFromTriplets(ptrip.begin(), ptrip.end());
    Bfull += Pot;
  }
  // Eliminate the origin unknown: psi(0) = 0 for m >= 1, and for m = 0 the
  // even interpolation from the first three interior nodes.
  std::vector<Eigen::Triplet<double>> etrip;
  for (int i = 0; i < n; ++i) etrip.emplace_back(i + 1, i, 1.0);
  if (m == 0) {
    for (int t = 0; t < 3; ++t) etrip.emplace_back(0, t, kOrigin[t]);
  }
  Eigen::SparseMatrix<double> P(nu, n);
  P.setFromTriplets(etrip.begin(), etrip.end());
  op.form = Eigen::SparseMatrix<double>(P.transpose() * Bfull * P);
  op.form.makeCompressed();
  return op;
}

std::vector<EigenPair> top_eigenpairs(const DiscreteOperator& A, int k) {
  const int n = A.size();
  k = std::min(k, n);
  int kd = 0;
  for (int j = 0; j < A.form.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A.form, j); it; ++it) {
      kd = std::max(kd, std::abs(static_cast<int>(it.row()) -
                                 static_cast<int>(it.col())));
    }
  }
  const int ldab = kd + 1;

  // Similarity transform to a plain symmetric band matrix:
  //   Bhat = W^{-1/2} B W^{-1/2}.
  std::vector<double> sqw(n);
  for (int i = 0; i < n; ++i) sqw[i] = std::sqrt(A.measure_weights[i]);
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  for (int j = 0; j < A.form.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A.form, j); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (r < c || r > c + kd) continue;  // lower triangle, band
      ab[(r - c) + static_cast<std::size_t>(c) * ldab] =
          it.value() / (sqw[r] * sqw[c]);
    }
  }

  // Eigenvalues by bisection (jobz='N' skips the O(n^3) accumulation of the
  // band-to-tridiagonal transform); eigenvectors by shifted inverse iteration
  // on the sparse pencil, which is O(n) per pair at this bandwidth.
  std::vector<double> eigval(n);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, 'N', 'I', 'L', n, kd, ab.data(), ldab, nullptr, n,
      0.0, 0.0, n - k + 1, n, 2.0 * LAPACKE_dlamch('S'), &found, eigval.data(),
      nullptr, n, ifail.data());
  if (info != 0 || found != k) {
    throw std::runtime_error("top_eigenpairs: dsbevx failed, info=" + std::to_string(info));
  }

  // Bhat as a sparse matrix for the inverse-iteration solves.
  Eigen::SparseMatrix<double> bhat = A.form;
  for (int j = 0; j < bhat.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(bhat, j); it; ++it) {
      it.valueRef() /= sqw[it.row()] * sqw[it.col()];
    }
  }
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(eigval[i < found ? i : found - 1]));
  anorm = std::max(anorm, 1.0);

  Eigen::SparseMatrix<double> eye(n, n);
  eye.setIdentity();
  std::vector<Eigen::VectorXd> vecs(k);
  for (int e = 0; e < k; ++e) {
    const double shift = eigval[e] + 64.0 * std::numeric_limits<double>::epsilon() * anorm;
    Eigen::SparseMatrix<double> M = bhat - shift * eye;
    M.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("top_eigenpairs: singular shifted factorization");
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; i += 2) v[i] += 0.5;  // break symmetry with the shift direction
    v.normalize();
    for (int it = 0; it < 5; ++it) {
      v = lu.solve(v);
      // deflate clustered pairs already found
      for (int p = 0; p < e; ++p) {
        if (std::abs(eigval[p] - eigval[e]) < 1e-6 * anorm) v -= vecs[p].dot(v) * vecs[p];
      }
      const double nrm = v.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw std::runtime_error("top_eigenpairs: inverse iteration broke down");
      }
      v /= nrm;
      Eigen::VectorXd r = bhat * v - eigval[e] * v;
      if (r.norm() <= 32.0 * std::numeric_limits<double>::epsilon() * anorm) break;
    }
    vecs[e] = v;
  }

  std::vector<EigenPair> out(k);
  for (int e = 0; e < k; ++e) {
    EigenPair& ep = out[k - 1 - e];  // descending order
    ep.lambda = eigval[e];
    ep.psi.resize(n);
    for (int i = 0; i < n; ++i) ep.psi[i] = vecs[e][i] / sqw[i];
    // sign fix: extremal component positive
    double ext = 0.0;
    for (double v : ep.psi) if (std::abs(v) > std::abs(ext)) ext = v;
    if (ext < 0.0) for (double& v : ep.psi) v = -v;
    ep.norm_sq = A.inner(ep.psi, ep.psi);
    auto dpsi = derivative4(ep.psi, A.coord[1] - A.coord[0], false);
    ep.dpsi_norm_sq = A.inner(dpsi, dpsi);
  }
  return out;
}

EigenPair ground_state(const DiscreteOperator& A) {
  return top_eigenpairs(A, 1).front();
}

std::vector<double> solve_phi(const DiscreteOperator& A, int j) {
  if (j != 1 && j != 2) throw std::invalid_argument("solve_phi: order must be 1 or 2");
  if (A.morphology == Morphology::filament && A.azimuthal_index != 0) {
    throw std::invalid_argument("solve_phi: filament Phi_j is defined for m = 0 only");
  }
  const EquilibriumProfile& p = A.profile;
  const bool radial = p.morphology == Morphology::filament;
  const int nh = p.grid.n_points;
  const int n = nh - 1;  // unknowns 0 .. nh-2; far-field value pinned at nh-1
  const double h = p.grid.spacing();
  const double alpha = p.well.alpha_minus();
  const double farfield[2] = {-1.0 / alpha, 1.0 / (alpha * alpha)};

  // One assembly serves both orders; boundary columns are accumulated
  // separately so each solve can subtract its own far-field lift.
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd bnd = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    auto scatter = [&](int q, double v) {
      if (q < 0) q = -q;  // even reflection
      if (q >= nh - 1) {
        bnd[i] += v;  // references the pinned far-field constant
        return;
      }
      trip.emplace_back(i, q, v);
    };
    const bool origin = radial && i == 0;
    for (int k = -2; k <= 2; ++k) {
      double v = kC2[k + 2] / (12.0 * h * h) * (origin ? 2.0 : 1.0);
      if (radial && i > 0) v += kC1[k + 2] / (12.0 * h * (i * h));
      scatter(i + k, v);
    }
    trip.emplace_back(i, i, -p.well.derivative(p.values[i], 2));
  }
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("solve_phi: restricted system is singular");
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n) - farfield[0] * bnd;
  Eigen::VectorXd phi1 = lu.solve(rhs);
  Eigen::VectorXd sol = phi1;
  double c = farfield[0];
  if (j == 2) {
    rhs = phi1 - farfield[1] * bnd;
    sol = lu.solve(rhs);
    c = farfield[1];
  }

  // Map the half-line solution onto the operator's active nodes.
  auto value_at = [&](int q) { return q >= nh - 1 ? c : sol[q]; };
  std::vector<double> out(A.size());
  if (radial) {
    for (int row = 0; row < A.size(); ++row) out[row] = value_at(row + 1);
  } else {
    for (int row = 0; row < A.size(); ++row) {
      out[row] = value_at(std::abs(row + 1 - (nh - 1)));
    }
  }
  return out;
}

}  // namespace fch
