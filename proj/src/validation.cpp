#include "tlbm/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tlbm/error.hpp"
#include "tlbm/initial_conditions.hpp"
#include "tlbm/planner.hpp"
#include "tlbm/runtime.hpp"

namespace tlbm {

namespace {

using Clock = std::chrono::steady_clock;

Check bounded(std::string name, double value, double tolerance, std::string detail = {}) {
  return {std::move(name), value, tolerance, std::isfinite(value) && value <= tolerance, std::move(detail)};
}

Check boolean(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(detail)};
}

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

bool bit_identical(const PopulationField& a, const PopulationField& b, const VelocitySet& vs, std::string& where) {
  const LatticeGeometry& g = a.geometry();
  for (int l = 0; l < vs.Q; ++l) {
    for (int x = 0; x < g.Lx; ++x) {
      for (int y = 0; y < g.Ly; ++y) {
        const double u = a(l, x, y), v = b(l, x, y);
        if (std::memcmp(&u, &v, sizeof u) != 0) {
          where = "l=" + std::to_string(l) + " x=" + std::to_string(x) + " y=" + std::to_string(y);
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

void SuiteReport::add(Check c) {
  passed = passed && c.passed;
  checks.push_back(std::move(c));
}

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["passed"] = passed;
  j["seconds"] = seconds;
  j["checks"] = nlohmann::json::array();
  for (const Check& c : checks) {
    j["checks"].push_back(
        {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return j.dump(2);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"conservation", "rank-invariance", "moments", "planner-oracle",
                                              "taylor-green"};
  return names;
}

SuiteReport run_suite(const std::string& name) {
  const auto t0 = Clock::now();
  SuiteReport r;
  if (name == "conservation") {
    r = validate_conservation();
  } else if (name == "rank-invariance") {
    r = validate_rank_invariance();
  } else if (name == "moments") {
    r = validate_moments();
  } else if (name == "planner-oracle") {
    r = validate_planner_oracle();
  } else if (name == "taylor-green") {
    r = validate_taylor_green();
  } else {
    std::string valid;
    for (const auto& n : suite_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown suite '" + name + "' (expected one of: " + valid + ")");
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

GlobalTotals global_totals(const PopulationField& f, const VelocitySet& vs) {
  const LatticeGeometry& g = f.geometry();
  long double m = 0, px = 0, py = 0;
  for (int l = 0; l < vs.Q; ++l) {
    long double s = 0;
    for (int x = 0; x < g.Lx; ++x) {
      for (int y = 0; y < g.Ly; ++y) s += f(l, x, y);
    }
    m += s;
    px += s * vs.c[l].x;
    py += s * vs.c[l].y;
  }
  return {static_cast<double>(m), static_cast<double>(px), static_cast<double>(py)};
}

SuiteReport validate_moments() {
  SuiteReport r;
  r.suite = "moments";
  for (const char* model : {"D2Q37", "D2Q9"}) {
    const VelocitySet vs = build_velocity_set(model);
    const std::string m = model;
    double sum_w = 0;
    for (double w : vs.w) sum_w += w;
    r.add(bounded(m + " weights sum to 1", std::abs(sum_w - 1.0), 1e-12));

    double odd = 0, even = 0;
    for (int p = 0; p <= vs.moment_order + 1; ++p) {
      for (int q = 0; p + q <= vs.moment_order + 1; ++q) {
        const double lat = lattice_moment(vs, p, q);
        if (p % 2 || q % 2) {
          odd = std::max(odd, std::abs(lat));
        } else if (p + q <= vs.moment_order) {
          even = std::max(even, std::abs(lat - gaussian_moment(p, q, vs.cs2)));
        }
      }
    }
    r.add(bounded(m + " odd moments vanish through order " + std::to_string(vs.moment_order + 1), odd, 1e-12));
    r.add(bounded(m + " even moments isotropic through order " + std::to_string(vs.moment_order), even, 1e-12));

    // The equilibrium reproduces the density, velocity and temperature it was built from.
    double worst = 0;
    for (const auto& [rho, ux, uy, T] : {std::array<double, 4>{1.0, 0.0, 0.0, vs.cs2},
                                         std::array<double, 4>{1.3, 0.05, -0.02, vs.cs2},
                                         std::array<double, 4>{0.7, -0.03, 0.04, 1.1 * vs.cs2}}) {
      if (vs.equilibrium_order < 4 && T != vs.cs2) continue;
      const SiteMoments got = moments(equilibrium(rho, ux, uy, T, vs), vs);
      worst = std::max({worst, relative(got.rho, rho), std::abs(got.ux - ux), std::abs(got.uy - uy)});
      if (vs.equilibrium_order >= 4) worst = std::max(worst, relative(got.T, T));
    }
    r.add(bounded(m + " equilibrium reproduces its moments", worst, 1e-12));
  }
  return r;
}

SuiteReport validate_conservation(int L, long long steps) {
  SuiteReport r;
  r.suite = "conservation";
  const VelocitySet vs = build_velocity_set("D2Q37");
  SimulationConfig cfg;
  cfg.Lx = cfg.Ly = L;
  cfg.model = vs.name;
  cfg.periodic_y = true;
  cfg.steps = steps;
  cfg.physics.gx = cfg.physics.gy = 0;
  cfg.init = random_near_equilibrium(vs, 2024, 0.02, 1.0, 0.05, -0.03);
  cfg.steps = 0;
  const RunResult start = run(cfg);
  cfg.steps = steps;
  const RunResult end = run(cfg);
  const GlobalTotals a = global_totals(*start.state, vs);
  const GlobalTotals b = global_totals(*end.state, vs);
  const double p0 = std::hypot(a.px, a.py);
  r.add(bounded("mass drift (relative)", std::abs(b.mass - a.mass) / a.mass, 1e-12));
  r.add(bounded("momentum drift (relative to |P0|)", std::hypot(b.px - a.px, b.py - a.py) / p0, 1e-12));
  return r;
}

SuiteReport validate_rank_invariance(int L, long long steps) {
  SuiteReport r;
  r.suite = "rank-invariance";
  const VelocitySet vs = build_velocity_set("D2Q37");
  SimulationConfig base;
  base.Lx = base.Ly = L;
  base.model = vs.name;
  base.steps = steps;
  base.physics.gy = -1e-4;
  base.physics.Twall_bot = 1.02 * vs.cs2;
  base.physics.Twall_top = 0.98 * vs.cs2;
  base.init = random_near_equilibrium(vs, 7, 0.01);
  base.schedule = Schedule::Staged;
  const RunResult ref = run(base);

  struct Variant {
    int np;
    Tiling tiling;
    Schedule schedule;
  };
  const Variant variants[] = {{1, Tiling::one_d(1), Schedule::Overlapped},
                              {4, Tiling::one_d(4), Schedule::Staged},
                              {4, Tiling::one_d(4), Schedule::Overlapped},
                              {4, Tiling::two_d(2, 2), Schedule::Overlapped},
                              {8, Tiling::two_d(2, 4), Schedule::Overlapped},
                              {8, Tiling::two_d(2, 4), Schedule::Staged}};
  for (const Variant& v : variants) {
    SimulationConfig cfg = base;
    cfg.ranks = v.np;
    cfg.tiling = v.tiling;
    cfg.schedule = v.schedule;
    const RunResult got = run(cfg);
    std::string where;
    const bool same = bit_identical(*ref.state, *got.state, vs, where);
    r.add(boolean(to_string(v.tiling) + " " + std::string(to_string(v.schedule)) + " matches 1 rank staged", same,
                  same ? "" : "first difference at " + where));
  }
  return r;
}

SuiteReport validate_planner_oracle(int max_np, int tuples) {
  SuiteReport r;
  r.suite = "planner-oracle";
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> edge(16, 8192), log_bw(8, 11), bytes(8, 512);
  int mismatches = 0;
  double worst_real = 0;
  std::string first;
  for (int t = 0; t < tuples; ++t) {
    const double Lx = std::round(edge(rng)), Ly = std::round(edge(rng));
    const double Bx = std::pow(10.0, log_bw(rng)), By = std::pow(10.0, log_bw(rng));
    const double S = bytes(rng);
    for (int np = 1; np <= max_np; ++np) {
      const CostModelInput in = CostModelInput::make(Lx, Ly, np, Bx, By, 1e-9, S);
      // Exhaustive minimisation over every divisor, written out independently of the planner.
      int best_nx = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int nx = 1; nx <= np; ++nx) {
        if (np % nx) continue;
        const int ny = np / nx;
        const double tc = Ly / (By * ny) + Lx / (Bx * nx);
        if (tc < best) {
          best = tc;
          best_nx = nx;
        }
      }
      const Grid g = optimal_grid_integer(in);
      if (g.nx != best_nx) {
        if (!mismatches) first = "Np=" + std::to_string(np) + " tuple " + std::to_string(t);
        ++mismatches;
      }
      const RealGrid rg = optimal_grid_real(in);
      const double R = std::sqrt(Lx * By / (Ly * Bx));
      worst_real = std::max({worst_real, relative(rg.nx, std::sqrt(double(np)) * R),
                             relative(rg.ny, std::sqrt(double(np)) / R)});
    }
  }
  r.add(boolean("integer optimum equals exhaustive search", mismatches == 0,
                mismatches ? std::to_string(mismatches) + " mismatches, first " + first : ""));
  r.add(bounded("real optimum relative error", worst_real, 1e-10));
  return r;
}

DecayFit taylor_green_decay(int L, long long steps, double tau, double u0) {
  const VelocitySet vs = build_velocity_set("D2Q9");
  SimulationConfig cfg;
  cfg.Lx = cfg.Ly = L;
  cfg.model = vs.name;
  cfg.periodic_y = true;
  cfg.steps = steps;
  cfg.physics.tau = tau;
  cfg.physics.gx = cfg.physics.gy = 0;
  cfg.physics.Twall_bot = cfg.physics.Twall_top = vs.cs2;
  cfg.init = taylor_green(vs, L, L, u0);
  cfg.gather_state = false;
  cfg.snapshot_every = std::max<long long>(1, steps / 20);
  std::vector<double> t, lnke;
  cfg.snapshot_sink = [&](long long step, const MacroFields& m) {
    double ke = 0;
    for (std::size_t i = 0; i < m.rho.size(); ++i) ke += 0.5 * m.rho[i] * (m.ux[i] * m.ux[i] + m.uy[i] * m.uy[i]);
    t.push_back(static_cast<double>(step));
    lnke.push_back(std::log(ke));
  };
  run(cfg);

  // Least-squares slope of ln KE against t.
  const double n = static_cast<double>(t.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sl += lnke[i];
    stt += t[i] * t[i];
    stl += t[i] * lnke[i];
  }
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  const double k = 2.0 * std::numbers::pi / L;
  const double nu = vs.cs2 * (tau - 0.5);
  DecayFit fit;
  fit.measured_rate = -slope;
  fit.expected_rate = 2.0 * nu * 2.0 * k * k;
  fit.relative_error = std::abs(fit.measured_rate - fit.expected_rate) / fit.expected_rate;
  return fit;
}

SuiteReport validate_taylor_green(int L, long long steps, double tau) {
  SuiteReport r;
  r.suite = "taylor-green";
  const DecayFit fit = taylor_green_decay(L, steps, tau);
  std::ostringstream d;
  d << "measured " << fit.measured_rate << " expected " << fit.expected_rate;
  r.add(bounded("kinetic energy decay rate (relative error)", fit.relative_error, 0.02, d.str()));
  return r;
}

}  // namespace tlbm
