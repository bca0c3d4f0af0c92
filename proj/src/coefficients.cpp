#include "fch/coefficients.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>

namespace fch {

namespace {

// Half-line trapezoid; even integrands double to the full line with no
// endpoint correction (odd derivatives vanish at z = 0).
double full_line_integral(const std::vector<double>& f, double h) {
  return 2.0 * trapezoid(f, h);
}

std::string cache_key(const char* kind, double xi, const GridSpec& g, double tol) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s|xi=%.17g|L=%.17g|N=%d|tol=%.17g|%s", kind, xi,
                g.half_length, g.n_points, tol, kCodeVersion);
  return buf;
}

}  // namespace

void ModelParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ModelParams: epsilon must be positive");
  if (!(domain_volume > 0.0)) throw std::invalid_argument("ModelParams: |Omega| must be positive");
  if (std::abs(eta_d - (eta1 - eta2)) > 1e-15) {
    throw std::invalid_argument("ModelParams: eta_d must equal eta1 - eta2");
  }
}

ModelParams ModelParams::make(double eps, double e1, double e2, double volume) {
  ModelParams mp{eps, e1, e2, e1 - e2, volume};
  mp.validate();
  return mp;
}

GridSpec default_grid(const WellParams& w, Geometry geom) {
  return GridSpec(GridSpec::default_half_length(w.alpha_minus()), 2001, geom);
}

BilayerCoefficients bilayer_coefficients(const WellParams& w, const GridSpec& g,
                                         const SolverOptions& opts) {
  auto p = solve_bilayer(w, g, opts);
  const double h = g.spacing();
  const int n = g.n_points;

  std::vector<double> hat(n), hat2(n), dsq(n);
  for (int i = 0; i < n; ++i) {
    hat[i] = p.values[i] - WellParams::b_minus;
    hat2[i] = hat[i] * hat[i];
    dsq[i] = p.derivative[i] * p.derivative[i];
  }

  BilayerCoefficients c;
  c.xi = w.xi();
  c.m_b = full_line_integral(hat, h);
  c.B_1 = full_line_integral(hat2, h);
  c.sigma_b = full_line_integral(dsq, h);
  c.nu_b = c.m_b / c.B_1;

  auto A = assemble_bilayer_operator(p);
  auto gs = ground_state(A);
  c.lambda_b0 = gs.lambda;
  c.psi_b0_norm_sq = gs.norm_sq;

  auto phi1 = solve_phi(A, 1);
  std::vector<double> integrand(A.size());
  for (int i = 0; i < A.size(); ++i) {
    integrand[i] = phi1[i] * w.derivative(A.profile_values[i], 3) * gs.psi[i];
  }
  c.S_b = A.inner(integrand, gs.psi);
  return c;
}

FilamentCoefficients filament_coefficients(const WellParams& w, const GridSpec& g,
                                           const SolverOptions& opts) {
  auto p = solve_filament(w, g, opts);
  const int n = g.n_points;

  std::vector<double> hat(n), hat2(n), dsq(n);
  for (int i = 0; i < n; ++i) {
    hat[i] = p.values[i] - WellParams::b_minus;
    hat2[i] = hat[i] * hat[i];
    dsq[i] = p.derivative[i] * p.derivative[i];
  }

  FilamentCoefficients c;
  c.xi = w.xi();
  c.m_f = radial_integral(hat, g);
  c.sigma_f = radial_integral(dsq, g);
  c.S_2 = radial_integral(hat2, g);
  c.nu_f = 2.0 * c.m_f / c.S_2;
  c.m_f_positive = c.m_f > 0.0;

  auto A = assemble_filament_operator(p, 0);
  auto top = top_eigenpairs(A, 2);
  if (!(top[0].lambda > 1e-6) || std::abs(top[1].lambda) < 1e-6 || top[1].lambda > 0.0) {
    throw AssumptionALfError(top[0].lambda, top[1].lambda);
  }
  const EigenPair& gs = top[0];
  c.lambda_f00 = gs.lambda;
  c.psi_f00_norm_sq = gs.norm_sq;
  c.dpsi_f00_norm_sq = gs.dpsi_norm_sq;

  auto phi1 = solve_phi(A, 1);
  std::vector<double> integrand(A.size());
  for (int i = 0; i < A.size(); ++i) {
    integrand[i] = phi1[i] * w.derivative(A.profile_values[i], 3) * gs.psi[i];
  }
  c.S_f = 2.0 * std::numbers::pi * A.inner(integrand, gs.psi);
  return c;
}

ShapeScan shape_factor_scan(const std::vector<double>& xis, std::optional<GridSpec> g) {
  ShapeScan scan;
  for (double xi : xis) {
    ShapeScanRow row;
    row.xi = xi;
    try {
      WellParams w(xi);
      GridSpec gb = g ? *g : default_grid(w, Geometry::line);
      GridSpec gf(gb.half_length, gb.n_points, Geometry::radial);
      gb.geometry = Geometry::line;
      row.S_b = bilayer_coefficients(w, gb).S_b;
      row.S_f = filament_coefficients(w, gf).S_f;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    scan.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i) {
    const auto& a = scan.rows[i];
    const auto& b = scan.rows[i + 1];
    if (!a.ok || !b.ok) continue;
    if (a.S_b * b.S_b < 0.0) scan.S_b_crossings.emplace_back(a.xi, b.xi);
    if (a.S_f * b.S_f < 0.0) scan.S_f_crossings.emplace_back(a.xi, b.xi);
  }
  return scan;
}

void to_json(nlohmann::json& j, const BilayerCoefficients& c) {
  j = {{"xi", c.xi},           {"m_b", c.m_b},
       {"B_1", c.B_1},         {"sigma_b", c.sigma_b},
       {"nu_b", c.nu_b},       {"lambda_b0", c.lambda_b0},
       {"psi_b0_norm_sq", c.psi_b0_norm_sq}, {"S_b", c.S_b}};
}

void from_json(const nlohmann::json& j, BilayerCoefficients& c) {
  j.at("xi").get_to(c.xi);
  j.at("m_b").get_to(c.m_b);
  j.at("B_1").get_to(c.B_1);
  j.at("sigma_b").get_to(c.sigma_b);
  j.at("nu_b").get_to(c.nu_b);
  j.at("lambda_b0").get_to(c.lambda_b0);
  j.at("psi_b0_norm_sq").get_to(c.psi_b0_norm_sq);
  j.at("S_b").get_to(c.S_b);
}

void to_json(nlohmann::json& j, const FilamentCoefficients& c) {
  j = {{"xi", c.xi},           {"m_f", c.m_f},
       {"sigma_f", c.sigma_f}, {"S_2", c.S_2},
       {"nu_f", c.nu_f},       {"lambda_f00", c.lambda_f00},
       {"psi_f00_norm_sq", c.psi_f00_norm_sq},
       {"dpsi_f00_norm_sq", c.dpsi_f00_norm_sq},
       {"S_f", c.S_f},         {"m_f_positive", c.m_f_positive}};
}

void from_json(const nlohmann::json& j, FilamentCoefficients& c) {
  j.at("xi").get_to(c.xi);
  j.at("m_f").get_to(c.m_f);
  j.at("sigma_f").get_to(c.sigma_f);
  j.at("S_2").get_to(c.S_2);
  j.at("nu_f").get_to(c.nu_f);
  j.at("lambda_f00").get_to(c.lambda_f00);
  j.at("psi_f00_norm_sq").get_to(c.psi_f00_norm_sq);
  j.at("dpsi_f00_norm_sq").get_to(c.dpsi_f00_norm_sq);
  j.at("S_f").get_to(c.S_f);
  j.at("m_f_positive").get_to(c.m_f_positive);
}

CoefficientCache::CoefficientCache(std::string dir)
    : data_(std::make_unique<nlohmann::json>(nlohmann::json::object())) {
  std::filesystem::create_directories(dir);
  path_ = (std::filesystem::path(dir) / "coefficients.json").string();
  load();
}

void CoefficientCache::load() {
  std::ifstream in(path_);
  if (!in) return;
  try {
    in >> *data_;
  } catch (const nlohmann::json::exception&) {
    *data_ = nlohmann::json::object();  // corrupt cache: start over
  }
}

void CoefficientCache::save() const {
  std::ofstream out(path_);
  out << data_->dump(2) << '\n';
}

std::optional<BilayerCoefficients> CoefficientCache::find_bilayer(double xi, const GridSpec& g,
                                                                  double tol) {
  auto it = data_->find(cache_key("bilayer", xi, g, tol));
  if (it == data_->end()) return std::nullopt;
  ++hits_;
  return it->get<BilayerCoefficients>();
}

std::optional<FilamentCoefficients> CoefficientCache::find_filament(double xi, const GridSpec& g,
                                                                    double tol) {
  auto it = data_->find(cache_key("filament", xi, g, tol));
  if (it == data_->end()) return std::nullopt;
  ++hits_;
  return it->get<FilamentCoefficients>();
}

void CoefficientCache::store(const BilayerCoefficients& c, const GridSpec& g, double tol) {
  (*data_)[cache_key("bilayer", c.xi, g, tol)] = c;
  save();
}

void CoefficientCache::store(const FilamentCoefficients& c, const GridSpec& g, double tol) {
  (*data_)[cache_key("filament", c.xi, g, tol)] = c;
  save();
}

BilayerCoefficients CoefficientCache::bilayer(const WellParams& w, const GridSpec& g,
                                              const SolverOptions& opts) {
  if (auto hit = find_bilayer(w.xi(), g, opts.tol)) return *hit;
  auto c = bilayer_coefficients(w, g, opts);
  store(c, g, opts.tol);
  return c;
}

FilamentCoefficients CoefficientCache::filament(const WellParams& w, const GridSpec& g,
                                                const SolverOptions& opts) {
  if (auto hit = find_filament(w.xi(), g, opts.tol)) return *hit;
  auto c = filament_coefficients(w, g, opts);
  store(c, g, opts.tol);
  return c;
}

}  // namespace fch
