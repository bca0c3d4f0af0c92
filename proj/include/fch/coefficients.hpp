#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fch/operators.hpp"

#include <nlohmann/json_fwd.hpp>

namespace fch {

inline constexpr const char* kCodeVersion = "fch-0.1.0";

/// Functionalization and domain parameters of the free energy.
struct ModelParams {
  double epsilon = 0.03;
  double eta1 = 0.15;
  double eta2 = 0.15;
  double eta_d = 0.0;  // eta1 - eta2, stored redundantly and checked
  double domain_volume = 8.0 * 3.14159265358979323846 * 3.14159265358979323846 *
                         3.14159265358979323846;  // |[-pi,pi]^3|

  void validate() const;
  static ModelParams make(double eps, double e1, double e2, double volume);
};

/// Derived scalars of the bilayer morphology.
struct BilayerCoefficients {
  double xi = 0.0;
  double m_b = 0.0;      // integral of (phi_b - b_-) dz
  double B_1 = 0.0;      // || phi_b - b_- ||^2
  double sigma_b = 0.0;  // || phi_b' ||^2
  double nu_b = 0.0;     // m_b / B_1
  double lambda_b0 = 0.0;
  double psi_b0_norm_sq = 0.0;
  double S_b = 0.0;

  double mu_b_star(const ModelParams& mp) const {
    return -0.5 * (mp.eta1 + mp.eta2) * sigma_b / m_b;
  }
};

/// Derived scalars of the filament morphology.
struct FilamentCoefficients {
  double xi = 0.0;
  double m_f = 0.0;      // integral of (phi_f - b_-) R dR
  double sigma_f = 0.0;  // integral of (phi_f')^2 R dR
  double S_2 = 0.0;      // integral of (phi_f - b_-)^2 R dR
  double nu_f = 0.0;     // 2 m_f / S_2
  double lambda_f00 = 0.0;
  double psi_f00_norm_sq = 0.0;
  double dpsi_f00_norm_sq = 0.0;
  double S_f = 0.0;
  bool m_f_positive = true;  // checked, not assumed; flips inequalities downstream

  double mu_f_star(const ModelParams& mp) const {
    return mp.eta1 * sigma_f / (2.0 * m_f);
  }
};

/// Structured failure of the spectral assumption on L_{f,0}.
struct AssumptionALfError : std::runtime_error {
  AssumptionALfError(double top, double next)
      : std::runtime_error(
            "Assumption A-Lf violated: L_{f,0} must have exactly one positive "
            "eigenvalue and no kernel (top = " + std::to_string(top) +
            ", next = " + std::to_string(next) + ")"),
        top_eigenvalue(top), next_eigenvalue(next) {}
  double top_eigenvalue, next_eigenvalue;
};

GridSpec default_grid(const WellParams& w, Geometry geom);

BilayerCoefficients bilayer_coefficients(const WellParams& w, const GridSpec& g,
                                         const SolverOptions& opts = {});
FilamentCoefficients filament_coefficients(const WellParams& w, const GridSpec& g,
                                           const SolverOptions& opts = {});

struct ShapeScanRow {
  double xi = 0.0;
  double S_b = 0.0;
  double S_f = 0.0;
  bool ok = true;
  std::string error;
};

struct ShapeScan {
  std::vector<ShapeScanRow> rows;
  // brackets [xi_i, xi_{i+1}] where the sign flips
  std::vector<std::pair<double, double>> S_b_crossings;
  std::vector<std::pair<double, double>> S_f_crossings;
};

/// Monotone scan of the shape factors over a list of tilts; per-xi failures
/// are recorded and the scan continues.
ShapeScan shape_factor_scan(const std::vector<double>& xis, std::optional<GridSpec> g = {});

void to_json(nlohmann::json& j, const BilayerCoefficients& c);
void from_json(const nlohmann::json& j, BilayerCoefficients& c);
void to_json(nlohmann::json& j, const FilamentCoefficients& c);
void from_json(const nlohmann::json& j, FilamentCoefficients& c);

/// JSON-file cache of coefficient records keyed by (xi, L, N, tol, version).
/// Diagram sweeps reuse the expensive eigensolves through it.
class CoefficientCache {
public:
  explicit CoefficientCache(std::string dir);

  std::optional<BilayerCoefficients> find_bilayer(double xi, const GridSpec& g, double tol);
  std::optional<FilamentCoefficients> find_filament(double xi, const GridSpec& g, double tol);
  void store(const BilayerCoefficients& c, const GridSpec& g, double tol);
  void store(const FilamentCoefficients& c, const GridSpec& g, double tol);

  int hits() const { return hits_; }

  /// Cached-or-computed convenience wrappers.
  BilayerCoefficients bilayer(const WellParams& w, const GridSpec& g,
                              const SolverOptions& opts = {});
  FilamentCoefficients filament(const WellParams& w, const GridSpec& g,
                                const SolverOptions& opts = {});

private:
  std::string path_;
  int hits_ = 0;
  void load();
  void save() const;
  std::unique_ptr<nlohmann::json> data_;
};

}  // namespace fch
