// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Each check recomputes its inputs from scratch through the
// public API so the gate exercises the full pipeline.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fch/bifurcation.hpp"
#include "fch/coefficients.hpp"
#include "fch/dynamics.hpp"
#include "fch/operators.hpp"

using namespace fch;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& msg) {
    if (!cond) ok = false;
    note << (cond ? "[ok] " : "[FAILED] ") << msg << "; ";
  }
};

double now_minus(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const BilayerCoefficients& bilayer_at(double xi) {
  static std::map<double, BilayerCoefficients> cache;
  auto it = cache.find(xi);
  if (it == cache.end()) {
    WellParams w(xi);
    it = cache.emplace(xi, bilayer_coefficients(w, default_grid(w, Geometry::line))).first;
  }
  return it->second;
}

const FilamentCoefficients& filament_at(double xi) {
  static std::map<double, FilamentCoefficients> cache;
  auto it = cache.find(xi);
  if (it == cache.end()) {
    WellParams w(xi);
    it = cache.emplace(xi, filament_coefficients(w, default_grid(w, Geometry::radial))).first;
  }
  return it->second;
}

double cosine_to_slope(const DiscreteOperator& A, const std::vector<double>& psi) {
  const double ss = A.inner(A.profile_slope, A.profile_slope);
  return std::abs(A.inner(psi, A.profile_slope)) / std::sqrt(ss);
}

// ---------------------------------------------------------------- criterion 1
Check criterion_profile() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  WellParams w(-0.5);
  GridSpec g(20.0, 2001, Geometry::line);
  const EquilibriumProfile p = solve_bilayer(w, g);
  const double elapsed = now_minus(t0);

  double defect = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    defect = std::max(defect,
                      std::abs(0.5 * p.derivative[i] * p.derivative[i] - w.eval(p.values[i])));
  }
  const double u_star = (5.0 - std::sqrt(13.0)) / 6.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "first-integral defect %.2e < 1e-8", defect);
  c.require(defect < 1e-8, buf);
  std::snprintf(buf, sizeof buf, "|max - (5-sqrt(13))/6| = %.2e < 1e-6",
                std::abs(p.max_value() - u_star));
  c.require(std::abs(p.max_value() - u_star) < 1e-6, buf);
  std::snprintf(buf, sizeof buf, "runtime %.2fs < 2s", elapsed);
  c.require(elapsed < 2.0, buf);
  return c;
}

// ---------------------------------------------------------------- criterion 2
Check criterion_kernels() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  WellParams w(-0.5);
  const auto pb = solve_bilayer(w, default_grid(w, Geometry::line));
  const auto pf = solve_filament(w, default_grid(w, Geometry::radial));

  const auto Lb0 = assemble_bilayer_operator(pb);
  const auto top_b = top_eigenpairs(Lb0, 2);
  char buf[160];
  std::snprintf(buf, sizeof buf, "|L_b0 eigenvalue nearest 0| = %.2e < 1e-5",
                std::abs(top_b[1].lambda));
  c.require(std::abs(top_b[1].lambda) < 1e-5, buf);
  std::snprintf(buf, sizeof buf, "bilayer kernel cosine %.6f > 0.999",
                cosine_to_slope(Lb0, top_b[1].psi));
  c.require(cosine_to_slope(Lb0, top_b[1].psi) > 0.999, buf);
  std::snprintf(buf, sizeof buf, "lambda_b0 = %.4f > 0", top_b[0].lambda);
  c.require(top_b[0].lambda > 0.0, buf);

  const auto Lf1 = assemble_filament_operator(pf, 1);
  const auto top_f1 = top_eigenpairs(Lf1, 1);
  std::snprintf(buf, sizeof buf, "|L_f1 eigenvalue nearest 0| = %.2e < 1e-5",
                std::abs(top_f1[0].lambda));
  c.require(std::abs(top_f1[0].lambda) < 1e-5, buf);
  std::snprintf(buf, sizeof buf, "filament kernel cosine %.6f > 0.999",
                cosine_to_slope(Lf1, top_f1[0].psi));
  c.require(cosine_to_slope(Lf1, top_f1[0].psi) > 0.999, buf);

  const auto Lf2 = assemble_filament_operator(pf, 2);
  const double lf2 = top_eigenpairs(Lf2, 1)[0].lambda;
  std::snprintf(buf, sizeof buf, "L_f2 top eigenvalue = %.4f < 0", lf2);
  c.require(lf2 < 0.0, buf);

  const double elapsed = now_minus(t0);
  std::snprintf(buf, sizeof buf, "runtime %.2fs < 30s", elapsed);
  c.require(elapsed < 30.0, buf);
  return c;
}

// ---------------------------------------------------------------- criterion 3
Check criterion_shape_scan() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto xis = linspace(-0.9, -0.4, 11);  // step 0.05
  const ShapeScan scan = shape_factor_scan(xis);
  for (const auto& row : scan.rows) {
    if (!row.ok) c.require(false, "scan row xi=" + std::to_string(row.xi) + ": " + row.error);
  }

  auto inside = [](const std::pair<double, double>& br, double lo, double hi) {
    return br.first >= lo - 1e-12 && br.second <= hi + 1e-12;
  };
  std::ostringstream sb;
  sb << "S_b crossings:";
  for (auto& br : scan.S_b_crossings) sb << " [" << br.first << "," << br.second << "]";
  std::ostringstream sf;
  sf << "S_f crossings:";
  for (auto& br : scan.S_f_crossings) sf << " [" << br.first << "," << br.second << "]";

  c.require(scan.S_b_crossings.size() == 1 &&
                inside(scan.S_b_crossings.front(), -0.70, -0.60),
            "exactly one S_b sign change inside [-0.70,-0.60] (" + sb.str() + ")");
  c.require(scan.S_f_crossings.size() == 1 &&
                inside(scan.S_f_crossings.front(), -0.75, -0.65),
            "exactly one S_f sign change inside [-0.75,-0.65] (" + sf.str() + ")");

  const double elapsed = now_minus(t0);
  char buf[80];
  std::snprintf(buf, sizeof buf, "runtime %.1fs < 300s", elapsed);
  c.require(elapsed < 300.0, buf);
  return c;
}

// ---------------------------------------------------------------- criterion 4
Check criterion_diagram_topology() {
  Check c;
  const double eta1 = 0.15;
  const auto eta_d_grid = linspace(-1.0, 1.0, 201);
  const auto mu1_grid = linspace(-1.0, 1.0, 201);

  auto admissible_count = [&](double xi) {
    const auto rows = diagram(bilayer_at(xi), filament_at(xi), eta1, eta_d_grid, mu1_grid);
    long n = 0;
    for (const auto& r : rows) n += r.flags.admissible() ? 1 : 0;
    return n;
  };

  const long n85 = admissible_count(-0.85);
  const long n30 = admissible_count(-0.3);
  char buf[160];
  std::snprintf(buf, sizeof buf, "admissible set at xi=-0.85 nonempty (%ld cells)", n85);
  c.require(n85 > 0, buf);
  std::snprintf(buf, sizeof buf, "admissible set at xi=-0.3 empty (found %ld cells)", n30);
  c.require(n30 == 0, buf);

  // Pearling boundary heights along mu1 at eta_d = +0.5.
  auto boundaries = [&](double xi) {
    const ThresholdLines t = threshold_lines(bilayer_at(xi), filament_at(xi), eta1);
    const double eta_d = 0.5;
    return std::pair{-t.sign_S_b * t.slope_b * eta_d, -t.sign_S_f * t.slope_f * eta_d};
  };
  const auto [b85, f85] = boundaries(-0.85);
  const auto [b50, f50] = boundaries(-0.5);
  std::snprintf(buf, sizeof buf,
                "pearling boundaries at eta_d=0.5: xi=-0.85 bilayer %.3f vs filament %.3f",
                b85, f85);
  c.require(b85 > f85, buf);
  std::snprintf(buf, sizeof buf,
                "ordering reversed at xi=-0.5: bilayer %.3f vs filament %.3f", b50, f50);
  c.require(f50 > b50, buf);
  return c;
}

// ---------------------------------------------------------------- criterion 5
Check criterion_dynamics() {
  Check c;
  const auto& bc = bilayer_at(-0.5);
  const auto& fc = filament_at(-0.5);
  char buf[160];

  // (a) frozen far-field potential: huge domain keeps mu1 constant, and the
  // single-sphere extinction time has the closed form R0^2/(4 nu_b (mu_b*-mu1)).
  {
    DynamicsConfig cfg;
    cfg.model = ModelParams::make(0.03, 0.15, 0.35, 1e12);
    cfg.spheres = {1.0};
    cfg.mu1_init = -0.2;
    cfg.integrator.r_min = 1e-5;
    const double mu_b = bc.mu_b_star(cfg.model);
    const double tau_c = 1.0 / (4.0 * bc.nu_b * (mu_b + 0.2));
    cfg.tau_final = 1.5 * tau_c;
    const Trajectory tr = evolve(cfg, bc, fc);
    const double rel = tr.events.empty()
                           ? 1.0
                           : std::abs(tr.events[0].tau - tau_c) / tau_c;
    std::snprintf(buf, sizeof buf, "frozen-mu1 extinction time rel err %.2e < 1e-6", rel);
    c.require(rel < 1e-6, buf);
  }

  // (b) constraint-mode mass drift over tau in [0, 10]
  {
    DynamicsConfig cfg;
    cfg.model = ModelParams::make(0.03, 0.15, 0.35, 10.0);
    cfg.spheres = {2.0, 1.2};
    cfg.hoops = {1.5};
    cfg.mu1_init = 0.25;
    cfg.tau_final = 10.0;
    cfg.output_times = linspace(0.0, 10.0, 101);
    const Trajectory tr = evolve(cfg, bc, fc);
    double drift = 0.0;
    const double m0 = tr.samples.front().mass_hat;
    for (const auto& s : tr.samples) {
      drift = std::max(drift, std::abs(s.mass_hat - m0) / std::abs(m0));
    }
    std::snprintf(buf, sizeof buf, "constraint-mode mass drift %.2e < 1e-10", drift);
    c.require(drift < 1e-10, buf);
  }

  // (c,d) forward invariance of the attracting hull on 100 random initial
  // conditions; stationary endpoints carry at most one morphology family.
  {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> radius(0.5, 3.0), mu(-0.5, 0.5);
    std::uniform_int_distribution<int> count(0, 3);
    double worst_escape = 0.0;
    bool stationary_ok = true;
    int stationary_runs = 0;
    DynamicsConfig cfg;
    cfg.model = ModelParams::make(0.03, 0.15, 0.35, 10.0);
    cfg.tau_final = 10.0;
    cfg.output_times = linspace(0.0, 10.0, 51);
    // a small extinction radius keeps the residual mass released when a
    // structure disappears (O(r_min^2)) below the escape tolerance
    cfg.integrator.r_min = 1e-4;
    const double lo = std::min(bc.mu_b_star(cfg.model), fc.mu_f_star(cfg.model));
    const double hi = std::max(bc.mu_b_star(cfg.model), fc.mu_f_star(cfg.model));
    for (int run = 0; run < 100; ++run) {
      cfg.spheres.clear();
      cfg.hoops.clear();
      int ns = count(rng), nh = count(rng);
      if (ns + nh == 0) ns = 1;
      for (int i = 0; i < ns; ++i) cfg.spheres.push_back(radius(rng));
      for (int j = 0; j < nh; ++j) cfg.hoops.push_back(radius(rng));
      cfg.mu1_init = mu(rng);
      const double hull_lo = std::min(lo, *cfg.mu1_init);
      const double hull_hi = std::max(hi, *cfg.mu1_init);
      const Trajectory tr = evolve(cfg, bc, fc);
      for (const auto& s : tr.samples) {
        worst_escape = std::max({worst_escape, hull_lo - s.mu1, s.mu1 - hull_hi});
      }
      const StateRate r = rhs(tr.final_state, cfg, bc, fc);
      double rate = 0.0;
      for (double v : r.sphere_rates) rate = std::max(rate, std::abs(v));
      for (double v : r.hoop_rates) rate = std::max(rate, std::abs(v));
      if (rate < 1e-8) {
        ++stationary_runs;
        bool sph = false, hp = false;
        for (double v : tr.final_state.sphere_radii) sph |= v > 0.0;
        for (double v : tr.final_state.hoop_radii) hp |= v > 0.0;
        if (sph && hp) stationary_ok = false;
      }
    }
    std::snprintf(buf, sizeof buf, "hull escape %.2e < 1e-6 over 100 random runs",
                  worst_escape);
    c.require(worst_escape < 1e-6, buf);
    std::snprintf(buf, sizeof buf,
                  "single family at every stationary endpoint (%d stationary runs)",
                  stationary_runs);
    c.require(stationary_ok, buf);
  }
  return c;
}

// ---------------------------------------------------------------- criterion 6
Check criterion_normalization() {
  Check c;
  const auto& bc = bilayer_at(-0.5);
  const auto& fc = filament_at(-0.5);
  const ThresholdLines ref = threshold_lines(bc, fc, 0.15);
  double worst = 0.0;
  for (double s : {0.1, 10.0}) {
    auto bc2 = bc;
    auto fc2 = fc;
    const double s2 = s * s;  // every pearling quantity is quadratic in psi
    bc2.psi_b0_norm_sq *= s2;
    bc2.S_b *= s2;
    fc2.psi_f00_norm_sq *= s2;
    fc2.dpsi_f00_norm_sq *= s2;
    fc2.S_f *= s2;
    const ThresholdLines t = threshold_lines(bc2, fc2, 0.15);
    worst = std::max(worst, std::abs(t.slope_b - ref.slope_b) / ref.slope_b);
    worst = std::max(worst, std::abs(t.slope_f - ref.slope_f) / ref.slope_f);
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "pearling thresholds shift %.2e < 1e-12 under psi scaling {0.1, 10}", worst);
  c.require(worst < 1e-12, buf);
  return c;
}

// ---------------------------------------------------------------- criterion 7
Check criterion_grid_convergence() {
  Check c;
  for (double xi : {-0.85, -0.5}) {
    WellParams w(xi);
    const double L0 = GridSpec::default_half_length(w.alpha_minus());
    GridSpec gb(L0, 2001, Geometry::line), gbf(1.5 * L0, 4001, Geometry::line);
    GridSpec gr(L0, 2001, Geometry::radial), grf(1.5 * L0, 4001, Geometry::radial);

    const auto b0 = bilayer_coefficients(w, gb);
    const auto b1 = bilayer_coefficients(w, gbf);
    const auto f0 = filament_coefficients(w, gr);
    const auto f1 = filament_coefficients(w, grf);

    double worst = 0.0;
    auto rel = [&worst](double a, double b) {
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    };
    rel(b0.m_b, b1.m_b);
    rel(b0.B_1, b1.B_1);
    rel(b0.sigma_b, b1.sigma_b);
    rel(b0.nu_b, b1.nu_b);
    rel(b0.lambda_b0, b1.lambda_b0);
    rel(b0.S_b, b1.S_b);
    rel(f0.m_f, f1.m_f);
    rel(f0.sigma_f, f1.sigma_f);
    rel(f0.S_2, f1.S_2);
    rel(f0.nu_f, f1.nu_f);
    rel(f0.lambda_f00, f1.lambda_f00);
    rel(f0.dpsi_f00_norm_sq, f1.dpsi_f00_norm_sq);
    rel(f0.S_f, f1.S_f);
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "xi=%.2f: max coefficient change %.2e < 1e-6 under (2N, 1.5L)", xi, worst);
    c.require(worst < 1e-6, buf);
  }
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* title;
    std::function<Check()> fn;
  };
  const Entry entries[] = {
      {"criterion 1 (bilayer profile accuracy)", criterion_profile},
      {"criterion 2 (operator kernels and signs)", criterion_kernels},
      {"criterion 3 (shape-factor sign changes)", criterion_shape_scan},
      {"criterion 4 (diagram topology)", criterion_diagram_topology},
      {"criterion 5 (competition dynamics)", criterion_dynamics},
      {"criterion 6 (normalization invariance)", criterion_normalization},
      {"criterion 7 (grid convergence)", criterion_grid_convergence},
  };

  int failures = 0;
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.note << "[FAILED] exception: " << ex.what();
    }
    const double elapsed = now_minus(t0);
    std::printf("%s %s [%.2fs] %s\n", c.ok ? "PASS" : "FAIL", e.title, elapsed,
                c.note.str().c_str());
    failures += c.ok ? 0 : 1;
  }
  std::printf("%d/7 criteria pass\n", 7 - failures);
  return failures == 0 ? 0 : 1;
}
