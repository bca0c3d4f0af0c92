#include "fch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fch {

namespace {

constexpr double kPi = std::numbers::pi;

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,         500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84,   0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

// Active members of the flattened ODE state.  Layout: sphere radii, hoop
// radii, then mu1 when the paper closure carries it as a state variable.
struct System {
  const DynamicsConfig& cfg;
  const BilayerCoefficients& bc;
  const FilamentCoefficients& fc;
  double alpha2;       // alpha_-^2
  double mu_b_star, mu_f_star;
  double mass_hat = 0.0;  // conserved target in constraint mode
  std::vector<int> sphere_ids, hoop_ids;
  bool paper;

  System(const DynamicsConfig& c, const BilayerCoefficients& b, const FilamentCoefficients& f)
      : cfg(c), bc(b), fc(f), paper(c.mode == ClosureMode::paper_ode) {
    const double alpha = 2.0 + bc.xi;
    alpha2 = alpha * alpha;
    mu_b_star = bc.mu_b_star(cfg.model);
    mu_f_star = fc.mu_f_star(cfg.model);
  }

  int n_spheres() const { return static_cast<int>(sphere_ids.size()); }
  int n_hoops() const { return static_cast<int>(hoop_ids.size()); }
  int dim() const { return n_spheres() + n_hoops() + (paper ? 1 : 0); }

  double morphology_mass(const std::vector<double>& y) const {
    double s = 0.0;
    for (int i = 0; i < n_spheres(); ++i) s += bc.m_b * 4.0 * kPi * y[i] * y[i];
    for (int j = 0; j < n_hoops(); ++j) {
      s += 2.0 * kPi * fc.m_f * cfg.model.epsilon * 2.0 * kPi * y[n_spheres() + j];
    }
    return s;
  }

  double mu1_of(const std::vector<double>& y) const {
    if (paper) return y.back();
    return alpha2 / cfg.model.domain_volume * (mass_hat - morphology_mass(y));
  }

  void deriv(const std::vector<double>& y, std::vector<double>& dy) const {
    dy.assign(y.size(), 0.0);
    const double mu1 = mu1_of(y);
    const double vb = bc.nu_b * (mu1 - mu_b_star);
    const double vf = fc.nu_f * (mu1 - mu_f_star);
    for (int i = 0; i < n_spheres(); ++i) dy[i] = 2.0 * vb / y[i];
    double inv_r_sum = 0.0;
    for (int j = 0; j < n_hoops(); ++j) {
      const double r = y[n_spheres() + j];
      dy[n_spheres() + j] = vf / r;
      inv_r_sum += 1.0 / r;
    }
    if (paper) {
      dy.back() = -alpha2 / cfg.model.domain_volume *
                  (16.0 * kPi * bc.nu_b * (mu1 - mu_b_star) * n_spheres() +
                   2.0 * cfg.model.epsilon * kPi * fc.nu_f * (mu1 - mu_f_star) * inv_r_sum);
    }
  }
};

double hermite(double t0, double h, double y0, double y1, double f0, double f1, double t) {
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1;
}

}  // namespace

void DynamicsConfig::validate() const {
  model.validate();
  if (mu1_init.has_value() == mass_hat.has_value()) {
    throw std::invalid_argument("DynamicsConfig: set exactly one of mu1_init / mass_hat");
  }
  if (!(integrator.r_min > 0.0) || !(integrator.rel_tol > 0.0) || !(integrator.abs_tol > 0.0)) {
    throw std::invalid_argument("DynamicsConfig: r_min and tolerances must be positive");
  }
  for (double r : spheres) {
    if (!(r > integrator.r_min)) {
      throw std::invalid_argument("DynamicsConfig: initial sphere radius at or below r_min");
    }
  }
  for (double r : hoops) {
    if (!(r > integrator.r_min)) {
      throw std::invalid_argument("DynamicsConfig: initial hoop radius at or below r_min");
    }
  }
}

StateRate rhs(const HybridState& s, const DynamicsConfig& cfg,
              const BilayerCoefficients& bc, const FilamentCoefficients& fc) {
  System sys(cfg, bc, fc);
  std::vector<double> y;
  for (std::size_t i = 0; i < s.sphere_radii.size(); ++i) {
    if (s.sphere_radii[i] > 0.0) {
      sys.sphere_ids.push_back(static_cast<int>(i));
      y.push_back(s.sphere_radii[i]);
    }
  }
  for (std::size_t j = 0; j < s.hoop_radii.size(); ++j) {
    if (s.hoop_radii[j] > 0.0) {
      sys.hoop_ids.push_back(static_cast<int>(j));
      y.push_back(s.hoop_radii[j]);
    }
  }
  if (sys.paper) {
    y.push_back(s.mu1);
  } else {
    sys.mass_hat = mass_total(s, cfg, bc, fc);
  }
  std::vector<double> dy;
  sys.deriv(y, dy);

  StateRate rate;
  rate.sphere_rates.assign(s.sphere_radii.size(), 0.0);
  rate.hoop_rates.assign(s.hoop_radii.size(), 0.0);
  for (int i = 0; i < sys.n_spheres(); ++i) rate.sphere_rates[sys.sphere_ids[i]] = dy[i];
  for (int j = 0; j < sys.n_hoops(); ++j) {
    rate.hoop_rates[sys.hoop_ids[j]] = dy[sys.n_spheres() + j];
  }
  if (sys.paper) rate.mu1_rate = dy.back();
  return rate;
}

double mu1_from_mass(const HybridState& s, const DynamicsConfig& cfg,
                     const BilayerCoefficients& bc, const FilamentCoefficients& fc,
                     double mass_hat) {
  const double alpha = 2.0 + bc.xi;
  double morph = 0.0;
  for (double R : s.sphere_radii) morph += bc.m_b * 4.0 * kPi * R * R;
  for (double r : s.hoop_radii) {
    morph += 2.0 * kPi * fc.m_f * cfg.model.epsilon * 2.0 * kPi * r;
  }
  return alpha * alpha / cfg.model.domain_volume * (mass_hat - morph);
}

double mass_total(const HybridState& s, const DynamicsConfig& cfg,
                  const BilayerCoefficients& bc, const FilamentCoefficients& fc) {
  const double alpha = 2.0 + bc.xi;
  double m = s.mu1 * cfg.model.domain_volume / (alpha * alpha);
  for (double R : s.sphere_radii) m += bc.m_b * 4.0 * kPi * R * R;
  for (double r : s.hoop_radii) {
    m += 2.0 * kPi * fc.m_f * cfg.model.epsilon * 2.0 * kPi * r;
  }
  return m;
}

Trajectory evolve(const DynamicsConfig& cfg, const BilayerCoefficients& bc,
                  const FilamentCoefficients& fc) {
  cfg.validate();
  System sys(cfg, bc, fc);
  for (std::size_t i = 0; i < cfg.spheres.size(); ++i) sys.sphere_ids.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < cfg.hoops.size(); ++j) sys.hoop_ids.push_back(static_cast<int>(j));

  // Initial mu1 / mass closure.
  HybridState init;
  init.sphere_radii = cfg.spheres;
  init.hoop_radii = cfg.hoops;
  if (cfg.mu1_init) {
    init.mu1 = *cfg.mu1_init;
    sys.mass_hat = mass_total(init, cfg, bc, fc);
  } else {
    sys.mass_hat = *cfg.mass_hat;
    init.mu1 = mu1_from_mass(init, cfg, bc, fc, sys.mass_hat);
  }

  std::vector<double> y(cfg.spheres);
  y.insert(y.end(), cfg.hoops.begin(), cfg.hoops.end());
  if (sys.paper) y.push_back(init.mu1);

  Trajectory traj;
  std::vector<double> out_times = cfg.output_times;
  if (out_times.empty()) out_times = linspace(0.0, cfg.tau_final, 101);
  std::size_t next_out = 0;

  auto sample_at = [&](double tau, const std::vector<double>& yy) {
    TrajectorySample s;
    s.tau = tau;
    s.spheres.assign(cfg.spheres.size(), 0.0);
    s.hoops.assign(cfg.hoops.size(), 0.0);
    for (int i = 0; i < sys.n_spheres(); ++i) s.spheres[sys.sphere_ids[i]] = yy[i];
    for (int j = 0; j < sys.n_hoops(); ++j) s.hoops[sys.hoop_ids[j]] = yy[sys.n_spheres() + j];
    s.mu1 = sys.mu1_of(yy);
    HybridState hs;
    hs.sphere_radii = s.spheres;
    hs.hoop_radii = s.hoops;
    hs.mu1 = s.mu1;
    s.mass_hat = mass_total(hs, cfg, bc, fc);
    return s;
  };

  double tau = 0.0;
  double h = std::min({1e-3 * std::max(cfg.tau_final, 1e-12), cfg.integrator.max_step,
                       cfg.tau_final});
  while (next_out < out_times.size() && out_times[next_out] <= tau) {
    traj.samples.push_back(sample_at(out_times[next_out++], y));
  }

  std::vector<double> k[7], ytmp, y5(y.size()), y4, f0, f1;
  sys.deriv(y, f0);
  int rejected_in_a_row = 0;
  while (tau < cfg.tau_final - 1e-14 * std::max(1.0, cfg.tau_final)) {
    h = std::min({h, cfg.integrator.max_step, cfg.tau_final - tau});
    if (h < 1e-14 * std::max(1.0, std::abs(tau))) {
      std::ostringstream os;
      os << "evolve: step-size underflow at tau=" << tau << " (state:";
      for (double v : y) os << ' ' << v;
      os << ")";
      throw std::runtime_error(os.str());
    }

    // Dormand-Prince stages (k[0] = f0 reused, FSAL).
    k[0] = f0;
    for (int s = 1; s < 7; ++s) {
      ytmp = y;
      for (int i = 0; i < s; ++i) {
        for (std::size_t d = 0; d < y.size(); ++d) ytmp[d] += h * kA[s][i] * k[i][d];
      }
      sys.deriv(ytmp, k[s]);
    }
    y5.assign(y.size(), 0.0);
    double err = 0.0;
    for (std::size_t d = 0; d < y.size(); ++d) {
      double v5 = y[d], v4 = y[d];
      for (int s = 0; s < 7; ++s) {
        v5 += h * kB5[s] * k[s][d];
        v4 += h * kB4[s] * k[s][d];
      }
      y5[d] = v5;
      const double sc = cfg.integrator.abs_tol +
                        cfg.integrator.rel_tol * std::max(std::abs(y[d]), std::abs(v5));
      const double e = (v5 - v4) / sc;
      err += e * e;
    }
    err = std::sqrt(err / std::max<std::size_t>(1, y.size()));

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (++rejected_in_a_row > 200) {
        throw std::runtime_error("evolve: repeated step rejection");
      }
      continue;
    }
    rejected_in_a_row = 0;

    f1 = k[6];  // FSAL: derivative at y5

    // Extinction events inside [tau, tau + h]: earliest crossing first.
    const int nr = sys.n_spheres() + sys.n_hoops();
    double t_event = tau + h;
    bool event = false;
    for (int d = 0; d < nr; ++d) {
      if (y5[d] > cfg.integrator.r_min) continue;
      // bisection on the cubic Hermite dense output
      double lo = tau, hi = tau + h;
      while (hi - lo > cfg.integrator.abs_tol) {
        const double mid = 0.5 * (lo + hi);
        const double v = hermite(tau, h, y[d], y5[d], f0[d], f1[d], mid);
        (v > cfg.integrator.r_min ? lo : hi) = mid;
      }
      const double tc = 0.5 * (lo + hi);
      if (tc < t_event || !event) t_event = std::min(t_event, tc);
      event = true;
    }
    const double t_acc = event ? t_event : tau + h;

    // Emit requested samples covered by this step.
    while (next_out < out_times.size() && out_times[next_out] <= t_acc) {
      const double to = out_times[next_out++];
      ytmp.resize(y.size());
      for (std::size_t d = 0; d < y.size(); ++d) {
        ytmp[d] = hermite(tau, h, y[d], y5[d], f0[d], f1[d], to);
      }
      traj.samples.push_back(sample_at(to, ytmp));
    }

    if (event) {
      // Advance to the event time and drop every member at or below r_min,
      // spheres before hoops, index order within one pass.
      ytmp.resize(y.size());
      for (std::size_t d = 0; d < y.size(); ++d) {
        ytmp[d] = hermite(tau, h, y[d], y5[d], f0[d], f1[d], t_event);
      }
      const double margin = cfg.integrator.r_min * (1.0 + 1e-9);
      std::vector<double> ynew;
      std::vector<int> new_sph, new_hoop;
      for (int i = 0; i < sys.n_spheres(); ++i) {
        if (ytmp[i] <= margin) {
          traj.events.push_back({sys.sphere_ids[i], t_event, true});
        } else {
          new_sph.push_back(sys.sphere_ids[i]);
          ynew.push_back(ytmp[i]);
        }
      }
      for (int j = 0; j < sys.n_hoops(); ++j) {
        const double v = ytmp[sys.n_spheres() + j];
        if (v <= margin) {
          traj.events.push_back({sys.hoop_ids[j], t_event, false});
        } else {
          new_hoop.push_back(sys.hoop_ids[j]);
          ynew.push_back(v);
        }
      }
      if (sys.paper) ynew.push_back(ytmp.back());
      sys.sphere_ids = std::move(new_sph);
      sys.hoop_ids = std::move(new_hoop);
      y = std::move(ynew);
      tau = t_event;
      sys.deriv(y, f0);
      h = std::max(h * 0.5, 1e-12);
      continue;
    }

    tau += h;
    y = y5;
    f0 = f1;
    h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
  }

  while (next_out < out_times.size()) {
    traj.samples.push_back(sample_at(out_times[next_out++], y));
  }

  traj.final_state.tau = tau;
  traj.final_state.sphere_radii.assign(cfg.spheres.size(), 0.0);
  traj.final_state.hoop_radii.assign(cfg.hoops.size(), 0.0);
  for (int i = 0; i < sys.n_spheres(); ++i) {
    traj.final_state.sphere_radii[sys.sphere_ids[i]] = y[i];
  }
  for (int j = 0; j < sys.n_hoops(); ++j) {
    traj.final_state.hoop_radii[sys.hoop_ids[j]] = y[sys.n_spheres() + j];
  }
  traj.final_state.mu1 = sys.mu1_of(y);
  traj.final_state.extinct = traj.events;
  return traj;
}

}  // namespace fch
