// fch: reduced-model pipeline for bilayer/filament competition.
//
// Subcommands: well, profile, spectrum, coeffs, scan-shape, diagram, evolve,
// repro.  All floats are serialized with 17 significant digits and fixed
// formatting so identical inputs yield byte-identical output.  Every output
// file gets a JSON manifest sidecar recording the resolved parameters.
// Exit codes: 0 success, 1 domain/solver error, 2 usage error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fch/bifurcation.hpp"
#include "fch/coefficients.hpp"
#include "fch/dynamics.hpp"
#include "fch/operators.hpp"
#include "fch/profile.hpp"
#include "fch/well.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string cache_dir() {
  const char* env = std::getenv("FCH_CACHE_DIR");
  return env && *env ? env : ".fch-cache/";
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

json manifest(const std::string& subcommand, json params, int cache_hits,
              double wall_time_s) {
  return json{{"subcommand", subcommand},
              {"parameters", std::move(params)},
              {"code_version", fch::kCodeVersion},
              {"cache_hits", cache_hits},
              {"wall_time_s", wall_time_s}};
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << body;
}

void write_manifest(const std::string& out_path, const json& m) {
  write_file(out_path + ".manifest.json", m.dump(2) + "\n");
}

fch::GridSpec resolve_grid(const fch::WellParams& w, fch::Geometry geom,
                           std::optional<double> L, std::optional<int> N) {
  fch::GridSpec g = fch::default_grid(w, geom);
  if (L) g = fch::GridSpec(*L, g.n_points, geom);
  if (N) g = fch::GridSpec(g.half_length, *N, geom);
  return g;
}

json grid_params(const fch::GridSpec& g) {
  return json{{"L", g.half_length}, {"N", g.n_points}};
}

std::vector<double> parse_range(const std::string& s) {
  // "a:b:n" inclusive linspace
  double a = 0.0, b = 0.0;
  int n = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1) {
    throw CLI::ValidationError("range", "expected a:b:n, got '" + s + "'");
  }
  return fch::linspace(a, b, n);
}

// ---------------------------------------------------------------------------

int cmd_well(double xi) {
  Timer t;
  fch::WellParams w(xi);
  json out{{"xi", xi},
           {"alpha_minus", w.alpha_minus()},
           {"W_at_bplus", w.eval(fch::WellParams::b_plus)}};
  try {
    out["u_star"] = w.positive_zero();
  } catch (const fch::NoHomoclinicError&) {
    out["u_star"] = nullptr;
    out["note"] = "no homoclinic turning point";
  }
  out["manifest"] = manifest("well", json{{"xi", xi}}, 0, t.seconds());
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_profile(const std::string& kind, double xi, std::optional<double> L,
                std::optional<int> N, double tol, const std::string& out_path) {
  Timer t;
  fch::WellParams w(xi);
  const bool bilayer = kind == "bilayer";
  fch::GridSpec g = resolve_grid(
      w, bilayer ? fch::Geometry::line : fch::Geometry::radial, L, N);
  fch::SolverOptions opts;
  opts.tol = tol;
  const fch::EquilibriumProfile p =
      bilayer ? fch::solve_bilayer(w, g, opts) : fch::solve_filament(w, g, opts);

  std::string csv = "coord,value,derivative\n";
  for (int i = 0; i < g.n_points; ++i) {
    csv += fmt(g.node(i)) + "," + fmt(p.values[i]) + "," + fmt(p.derivative[i]) +
           "\n";
  }
  write_file(out_path, csv);

  json params{{"kind", kind}, {"xi", xi}, {"tol", tol}};
  params.update(grid_params(g));
  json m = manifest("profile", params, 0, t.seconds());
  json side{{"residual_norm", p.residual_norm},
            {"max_value", p.max_value()},
            {"decay_rate_fit", p.decay_rate_fit()},
            {"manifest", m}};
  write_file(out_path + ".json", side.dump(2) + "\n");
  write_manifest(out_path, m);
  return 0;
}

int cmd_spectrum(const std::string& kind, double xi, int m_index,
                 std::optional<double> L, std::optional<int> N) {
  Timer t;
  fch::WellParams w(xi);
  const bool bilayer = kind == "bilayer";
  if (bilayer && m_index != 0) {
    throw CLI::ValidationError("--m", "azimuthal index applies to filament only");
  }
  fch::GridSpec g = resolve_grid(
      w, bilayer ? fch::Geometry::line : fch::Geometry::radial, L, N);
  const fch::EquilibriumProfile p =
      bilayer ? fch::solve_bilayer(w, g) : fch::solve_filament(w, g);
  const fch::DiscreteOperator op =
      bilayer ? fch::assemble_bilayer_operator(p)
              : fch::assemble_filament_operator(p, m_index);
  const auto pairs = fch::top_eigenpairs(op, 5);

  json evs = json::array();
  double kernel_residual = 1e300;
  for (const auto& e : pairs) {
    evs.push_back(e.lambda);
    kernel_residual = std::min(kernel_residual, std::abs(e.lambda));
  }
  json params{{"kind", kind}, {"xi", xi}, {"m", m_index}};
  params.update(grid_params(g));
  json out{{"eigenvalues", evs},
           {"kernel_residual", kernel_residual},
           {"manifest", manifest("spectrum", params, 0, t.seconds())}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_coeffs(double xi, double eta1, double eta2, std::optional<double> L,
               std::optional<int> N, double tol) {
  Timer t;
  fch::WellParams w(xi);
  fch::GridSpec gb = resolve_grid(w, fch::Geometry::line, L, N);
  fch::GridSpec gf = resolve_grid(w, fch::Geometry::radial, L, N);
  fch::SolverOptions opts;
  opts.tol = tol;
  fch::CoefficientCache cache(cache_dir());
  const fch::BilayerCoefficients bc = cache.bilayer(w, gb, opts);
  const fch::FilamentCoefficients fc = cache.filament(w, gf, opts);
  fch::ModelParams mp = fch::ModelParams::make(0.03, eta1, eta2, 1.0);

  json params{{"xi", xi}, {"eta1", eta1}, {"eta2", eta2}, {"tol", tol}};
  params["bilayer_grid"] = grid_params(gb);
  params["filament_grid"] = grid_params(gf);
  json out{{"bilayer", bc},
           {"filament", fc},
           {"mu_b_star", bc.mu_b_star(mp)},
           {"mu_f_star", fc.mu_f_star(mp)},
           {"manifest", manifest("coeffs", params, cache.hits(), t.seconds())}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_scan_shape(double from, double to, double step,
                   const std::string& out_path) {
  Timer t;
  if (step <= 0.0) throw CLI::ValidationError("--step", "must be positive");
  std::vector<double> xis;
  for (double xi = from; xi <= to + 1e-12; xi += step) xis.push_back(xi);
  const fch::ShapeScan scan = fch::shape_factor_scan(xis);

  std::string csv = "xi,S_b,S_f\n";
  json failures = json::array();
  for (const auto& row : scan.rows) {
    if (row.ok) {
      csv += fmt(row.xi) + "," + fmt(row.S_b) + "," + fmt(row.S_f) + "\n";
    } else {
      csv += fmt(row.xi) + ",nan,nan\n";
      failures.push_back(json{{"xi", row.xi}, {"error", row.error}});
    }
  }
  write_file(out_path, csv);

  json params{{"from", from}, {"to", to}, {"step", step}};
  json m = manifest("scan-shape", params, 0, t.seconds());
  if (!failures.empty()) m["failures"] = failures;
  write_manifest(out_path, m);
  return 0;
}

std::string diagram_csv(const fch::BilayerCoefficients& bc,
                        const fch::FilamentCoefficients& fc, double eta1,
                        const std::vector<double>& eta_d_grid,
                        const std::vector<double>& mu1_grid) {
  const auto rows = fch::diagram(bc, fc, eta1, eta_d_grid, mu1_grid);
  std::string csv = "eta_d,mu1,bp,fp,bf,ff,admissible,d_bp,d_fp,d_bf,d_ff\n";
  for (const auto& r : rows) {
    csv += fmt(r.eta_d) + "," + fmt(r.mu1) + ",";
    csv += fch::stability_code(r.flags.bilayer_pearling);
    csv += ',';
    csv += fch::stability_code(r.flags.filament_pearling);
    csv += ',';
    csv += fch::stability_code(r.flags.bilayer_fingering);
    csv += ',';
    csv += fch::stability_code(r.flags.filament_fingering);
    csv += ',';
    csv += r.flags.admissible() ? '1' : '0';
    csv += "," + fmt(r.d_bp) + "," + fmt(r.d_fp) + "," + fmt(r.d_bf) + "," +
           fmt(r.d_ff) + "\n";
  }
  return csv;
}

int cmd_diagram(double xi, double eta1, const std::string& eta_d_range,
                const std::string& mu1_range, const std::string& out_path) {
  Timer t;
  const auto eta_d_grid = parse_range(eta_d_range);
  const auto mu1_grid = parse_range(mu1_range);
  fch::WellParams w(xi);
  fch::CoefficientCache cache(cache_dir());
  const auto bc = cache.bilayer(w, fch::default_grid(w, fch::Geometry::line));
  const auto fc = cache.filament(w, fch::default_grid(w, fch::Geometry::radial));
  write_file(out_path, diagram_csv(bc, fc, eta1, eta_d_grid, mu1_grid));

  json params{{"xi", xi},
              {"eta1", eta1},
              {"eta_d", eta_d_range},
              {"mu1", mu1_range}};
  write_manifest(out_path, manifest("diagram", params, cache.hits(), t.seconds()));
  return 0;
}

fch::DynamicsConfig parse_dynamics_config(const json& j) {
  fch::DynamicsConfig cfg;
  const auto& mj = j.at("model");
  cfg.model = fch::ModelParams::make(
      mj.at("epsilon").get<double>(), mj.at("eta1").get<double>(),
      mj.at("eta2").get<double>(), mj.at("domain_volume").get<double>());
  cfg.spheres = j.value("spheres", std::vector<double>{});
  cfg.hoops = j.value("hoops", std::vector<double>{});
  if (j.contains("mu1_init")) cfg.mu1_init = j.at("mu1_init").get<double>();
  if (j.contains("mass_hat")) cfg.mass_hat = j.at("mass_hat").get<double>();
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "constraint") {
      cfg.mode = fch::ClosureMode::constraint;
    } else if (mode == "paper_ode") {
      cfg.mode = fch::ClosureMode::paper_ode;
    } else {
      throw std::invalid_argument("unknown closure mode: " + mode);
    }
  }
  if (j.contains("integrator")) {
    const auto& ij = j.at("integrator");
    cfg.integrator.rel_tol = ij.value("rel_tol", cfg.integrator.rel_tol);
    cfg.integrator.abs_tol = ij.value("abs_tol", cfg.integrator.abs_tol);
    cfg.integrator.r_min =
        ij.value("r_min", 10.0 * cfg.model.epsilon);
  } else {
    cfg.integrator.r_min = 10.0 * cfg.model.epsilon;
  }
  cfg.tau_final = j.value("tau_final", cfg.tau_final);
  cfg.output_times = j.value("output_times", std::vector<double>{});
  return cfg;
}

int cmd_evolve(const std::string& config_path, const std::string& out_path,
               std::optional<double> xi_override,
               std::optional<double> tau_final_override,
               std::optional<double> mu1_init_override) {
  Timer t;
  json j;
  {
    std::ifstream in(config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + config_path);
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw CLI::ValidationError("--config", e.what());
    }
  }
  double xi = j.at("well").at("xi").get<double>();
  if (xi_override) xi = *xi_override;
  fch::DynamicsConfig cfg = parse_dynamics_config(j);
  if (tau_final_override) cfg.tau_final = *tau_final_override;
  if (mu1_init_override) {
    cfg.mu1_init = *mu1_init_override;
    cfg.mass_hat.reset();
  }
  if (cfg.output_times.empty()) {
    cfg.output_times = fch::linspace(0.0, cfg.tau_final, 101);
  }
  cfg.validate();

  fch::WellParams w(xi);
  fch::CoefficientCache cache(cache_dir());
  const auto bc = cache.bilayer(w, fch::default_grid(w, fch::Geometry::line));
  const auto fc = cache.filament(w, fch::default_grid(w, fch::Geometry::radial));
  const fch::Trajectory tr = fch::evolve(cfg, bc, fc);

  std::string csv = "tau,mu1,mass_hat,n_spheres,n_hoops";
  for (std::size_t i = 0; i < cfg.spheres.size(); ++i)
    csv += ",R_" + std::to_string(i + 1);
  for (std::size_t i = 0; i < cfg.hoops.size(); ++i)
    csv += ",r_" + std::to_string(i + 1);
  csv += "\n";
  for (const auto& s : tr.samples) {
    int ns = 0, nh = 0;
    for (double v : s.spheres) ns += v > 0.0;
    for (double v : s.hoops) nh += v > 0.0;
    csv += fmt(s.tau) + "," + fmt(s.mu1) + "," + fmt(s.mass_hat) + "," +
           std::to_string(ns) + "," + std::to_string(nh);
    for (double v : s.spheres) csv += "," + fmt(v);
    for (double v : s.hoops) csv += "," + fmt(v);
    csv += "\n";
  }
  write_file(out_path, csv);

  json events = json::array();
  for (const auto& e : tr.events) {
    events.push_back(json{{"index", e.index},
                          {"tau", e.tau},
                          {"kind", e.sphere ? "sphere" : "hoop"}});
  }
  json params{{"config", config_path}, {"xi", xi}, {"tau_final", cfg.tau_final}};
  json m = manifest("evolve", params, cache.hits(), t.seconds());
  write_file(out_path + ".events.json",
             json{{"events", events}, {"manifest", m}}.dump(2) + "\n");
  write_manifest(out_path, m);
  return 0;
}

int cmd_repro(const std::string& out_dir) {
  Timer t;
  fs::create_directories(out_dir);
  const auto dir = fs::path(out_dir);

  // shape factors over the tilt range behind the sign-change panel
  {
    Timer ts;
    const auto xis = fch::linspace(-0.9, -0.3, 25);
    const fch::ShapeScan scan = fch::shape_factor_scan(xis);
    std::string csv = "xi,S_b,S_f\n";
    for (const auto& row : scan.rows) {
      csv += fmt(row.xi) + "," + (row.ok ? fmt(row.S_b) : "nan") + "," +
             (row.ok ? fmt(row.S_f) : "nan") + "\n";
    }
    const std::string path = (dir / "shape_factors.csv").string();
    write_file(path, csv);
    write_manifest(path, manifest("repro",
                                  json{{"panel", "shape_factors"},
                                       {"from", -0.9},
                                       {"to", -0.3},
                                       {"n", 25}},
                                  0, ts.seconds()));
  }

  // stability diagrams in the (eta_d, mu1) plane at four tilts
  fch::CoefficientCache cache(cache_dir());
  const double eta1 = 0.15;
  const auto eta_d_grid = fch::linspace(-1.0, 1.0, 101);
  const auto mu1_grid = fch::linspace(-0.5, 0.5, 101);
  for (double xi : {-0.85, -0.7, -0.5, -0.3}) {
    Timer ts;
    fch::WellParams w(xi);
    const auto bc = cache.bilayer(w, fch::default_grid(w, fch::Geometry::line));
    const auto fc =
        cache.filament(w, fch::default_grid(w, fch::Geometry::radial));
    char name[64];
    std::snprintf(name, sizeof name, "diagram_xi_%g.csv", xi);
    const std::string path = (dir / name).string();
    write_file(path, diagram_csv(bc, fc, eta1, eta_d_grid, mu1_grid));
    write_manifest(path, manifest("repro",
                                  json{{"panel", "diagram"},
                                       {"xi", xi},
                                       {"eta1", eta1},
                                       {"eta_d", "-1:1:101"},
                                       {"mu1", "-0.5:0.5:101"}},
                                  cache.hits(), ts.seconds()));
  }
  std::fprintf(stdout, "repro: wrote 5 CSV panels to %s in %ss\n",
               out_dir.c_str(), fmt(t.seconds()).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduced-model pipeline: equilibrium profiles, spectra, "
               "stability diagrams and competition dynamics"};
  app.require_subcommand(1);

  double xi = -0.5, eta1 = 0.15, eta2 = 0.15, tol = 1e-10;
  double from = -0.9, to = -0.3, step = 0.05;
  std::optional<double> L, tau_final, mu1_init, xi_override;
  std::optional<int> N;
  int m_index = 0;
  std::string kind, out_path, config_path, eta_d_range, mu1_range,
      out_dir = "repro-out";

  auto* well = app.add_subcommand("well", "double-well scalars as JSON");
  well->add_option("--xi", xi, "well tilt")->required();

  auto* profile = app.add_subcommand("profile", "equilibrium profile CSV");
  profile->add_option("kind", kind, "bilayer or filament")
      ->required()
      ->check(CLI::IsMember({"bilayer", "filament"}));
  profile->add_option("--xi", xi)->required();
  profile->add_option("--L", L, "domain truncation");
  profile->add_option("--N", N, "grid points");
  profile->add_option("--tol", tol, "Newton tolerance");
  profile->add_option("--out", out_path)->required();

  auto* spectrum = app.add_subcommand("spectrum", "leading eigenvalues as JSON");
  spectrum->add_option("kind", kind)->required()->check(
      CLI::IsMember({"bilayer", "filament"}));
  spectrum->add_option("--xi", xi)->required();
  spectrum->add_option("--m", m_index, "azimuthal index (filament)");
  spectrum->add_option("--L", L);
  spectrum->add_option("--N", N);

  auto* coeffs = app.add_subcommand("coeffs", "derived coefficients as JSON");
  coeffs->add_option("--xi", xi)->required();
  coeffs->add_option("--eta1", eta1);
  coeffs->add_option("--eta2", eta2);
  coeffs->add_option("--L", L);
  coeffs->add_option("--N", N);
  coeffs->add_option("--tol", tol);

  auto* scan = app.add_subcommand("scan-shape", "shape-factor scan CSV");
  scan->add_option("--from", from)->required();
  scan->add_option("--to", to)->required();
  scan->add_option("--step", step)->required();
  scan->add_option("--out", out_path)->required();

  auto* diag = app.add_subcommand("diagram", "stability diagram CSV");
  diag->add_option("--xi", xi)->required();
  diag->add_option("--eta1", eta1)->required();
  diag->add_option("--eta-d", eta_d_range, "a:b:n")->required();
  diag->add_option("--mu1", mu1_range, "a:b:n")->required();
  diag->add_option("--out", out_path)->required();

  auto* evolve = app.add_subcommand("evolve", "competition dynamics CSV");
  evolve->add_option("--config", config_path, "JSON config")->required();
  evolve->add_option("--out", out_path)->required();
  evolve->add_option("--xi", xi_override, "override config well tilt");
  evolve->add_option("--tau-final", tau_final, "override final time");
  evolve->add_option("--mu1-init", mu1_init, "override initial mu1");

  auto* repro = app.add_subcommand("repro", "regenerate the figure-panel CSVs");
  repro->add_option("--out-dir", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (well->parsed()) return cmd_well(xi);
    if (profile->parsed()) return cmd_profile(kind, xi, L, N, tol, out_path);
    if (spectrum->parsed()) return cmd_spectrum(kind, xi, m_index, L, N);
    if (coeffs->parsed()) return cmd_coeffs(xi, eta1, eta2, L, N, tol);
    if (scan->parsed()) return cmd_scan_shape(from, to, step, out_path);
    if (diag->parsed())
      return cmd_diagram(xi, eta1, eta_d_range, mu1_range, out_path);
    if (evolve->parsed())
      return cmd_evolve(config_path, out_path, xi_override, tau_final, mu1_init);
    if (repro->parsed()) return cmd_repro(out_dir);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
