// Acceptance checks: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tlbm/bench.hpp"
#include "tlbm/error.hpp"
#include "tlbm/initial_conditions.hpp"
#include "tlbm/planner.hpp"
#include "tlbm/runtime.hpp"
#include "tlbm/validation.hpp"

using namespace tlbm;

namespace {

constexpr double kMomentTol = 1e-12;
constexpr double kConservationTol = 1e-12;
constexpr double kRealOptimumTol = 1e-10;
constexpr double kScaleLimitTol = 1e-9;
constexpr double kDecayTol = 0.02;
constexpr double kWallVelocityTol = 1e-14;
constexpr double kWallTemperatureTol = 1e-12;
constexpr double kBandwidthMargin = 0.10;

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream line;
  line.precision(4);
  bool ok = o.passed;
  line << o.detail << "; " << s << " s";
  if (budget_s > 0) {
    line << " (budget " << budget_s << " s)";
    ok = ok && s <= budget_s;
  }
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), line.str().c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool identical(const PopulationField& a, const PopulationField& b) {
  const LatticeGeometry& g = a.geometry();
  for (int l = 0; l < g.Q; ++l) {
    for (int x = 0; x < g.Lx; ++x) {
      for (int y = 0; y < g.Ly; ++y) {
        if (!same_bits(a(l, x, y), b(l, x, y))) return false;
      }
    }
  }
  return true;
}

void fill_random(PopulationField& f, const VelocitySet& vs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const auto feq = equilibrium(1.0, 0.03, -0.02, vs.cs2, vs);
  const LatticeGeometry& g = f.geometry();
  for (int l = 0; l < vs.Q; ++l) {
    for (int x = -g.Hx; x < g.Lx + g.Hx; ++x) {
      for (int y = -g.Hy; y < g.Ly + g.Hy; ++y) f(l, x, y) = feq[l] * (1 + 0.05 * u(rng));
    }
  }
}

std::vector<HaloBenchRow> halo_rows;

const std::vector<HaloBenchRow>& measured_halo() {
  if (halo_rows.empty()) halo_rows = bench_halo_exchange({64, 128, 256, 512, 1024, 2048, 4096});
  return halo_rows;
}

}  // namespace

int main() {
  const VelocitySet q37 = build_velocity_set("D2Q37");

  criterion(1, "weights and moments", 1.0, [&] {
    double sum = 0;
    for (double w : q37.w) sum += w;
    double odd = 0, even = 0;
    for (int p = 0; p <= 8; ++p) {
      for (int q = 0; p + q <= 8; ++q) {
        const double m = lattice_moment(q37, p, q);
        if ((p % 2 || q % 2) && p + q <= 5) odd = std::max(odd, std::abs(m));
        if (p % 2 == 0 && q % 2 == 0) {
          // Isotropic Gaussian value written out: (p-1)!! (q-1)!! cs2^((p+q)/2).
          double df = 1;
          for (int k = p - 1; k > 1; k -= 2) df *= k;
          for (int k = q - 1; k > 1; k -= 2) df *= k;
          even = std::max(even, std::abs(m - df * std::pow(q37.cs2, (p + q) / 2)));
        }
      }
    }
    const double worst = std::max({std::abs(sum - 1), odd, even});
    return Outcome{worst <= kMomentTol, "|sum w - 1| " + sci(std::abs(sum - 1)) + ", odd<=5 " + sci(odd) +
                                            ", even<=8 " + sci(even) + " (tol " + sci(kMomentTol) + ")"};
  });

  criterion(2, "conservation", 30.0, [&] {
    SimulationConfig cfg;
    cfg.Lx = cfg.Ly = 64;
    cfg.model = "D2Q37";
    cfg.periodic_y = true;  // periodic in both directions: bc never runs
    cfg.physics.gx = cfg.physics.gy = 0;
    cfg.init = random_near_equilibrium(q37, 42, 0.02, 1.0, 0.04, -0.025);
    cfg.steps = 0;
    const GlobalTotals a = global_totals(*run(cfg).state, q37);
    cfg.steps = 500;
    const GlobalTotals b = global_totals(*run(cfg).state, q37);
    const double dm = std::abs(b.mass - a.mass) / a.mass;
    const double dp = std::hypot(b.px - a.px, b.py - a.py) / std::hypot(a.px, a.py);
    return Outcome{dm < kConservationTol && dp < kConservationTol,
                   "mass drift " + sci(dm) + ", momentum drift " + sci(dp) + " (tol " + sci(kConservationTol) + ")"};
  });

  criterion(3, "propagate permutation", 5.0, [&] {
    // Periodic halos filled by the 1-rank exchange, then one pull sweep.
    Communicator comm(1);
    const auto tiles = decompose(32, 32, 1, Tiling::one_d(1), true, q37.max_hop);
    Rank rank(tiles[0], q37, PhysicsParams{}, Layout::SoA, 3, 3, comm);
    std::mt19937_64 rng(3);
    fill_random(rank.fields().prv(), q37, rng);
    rank.pbc_nc(0);
    rank.pbc_c(0);
    const PopulationField& prv = rank.fields().prv();
    PopulationField& nxt = rank.fields().nxt();
    propagate(prv, nxt, q37, prv.geometry().physical());
    std::vector<double> before, after;
    for (int l = 0; l < q37.Q; ++l) {
      for (int x = 0; x < 32; ++x) {
        for (int y = 0; y < 32; ++y) {
          before.push_back(prv(l, x, y));
          after.push_back(nxt(l, x, y));
        }
      }
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    const bool same = std::equal(before.begin(), before.end(), after.begin(), same_bits);
    return Outcome{same, std::to_string(before.size()) + " values, multisets " + (same ? "equal" : "differ")};
  });

  criterion(4, "fused equivalence", 10.0, [&] {
    PhysicsParams p;
    p.tau = 0.8;
    p.gy = -1e-4;
    const Collider c(q37, p);
    std::mt19937_64 rng(4);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const LatticeGeometry g = make_geometry(16, 16, 3, 3, q37, trial % 2 ? Layout::AoS : Layout::SoA);
      PopulationField prv(g, BufferRole::Prv), fused(g, BufferRole::Nxt), staged(g, BufferRole::Nxt);
      fill_random(prv, q37, rng);
      propagate_collide_fused(prv, fused, c, g.physical());
      propagate(prv, staged, q37, g.physical());
      collide_region(staged, c, g.physical());
      if (!identical(fused, staged)) ++bad;
    }
    return Outcome{bad == 0, std::to_string(100 - bad) + "/100 states bit-identical"};
  });

  criterion(5, "rank-count invariance", 120.0, [&] {
    SimulationConfig base;
    base.Lx = base.Ly = 128;
    base.model = "D2Q37";
    base.steps = 100;
    base.physics.gy = -1e-4;
    base.physics.Twall_bot = 1.05 * q37.cs2;
    base.physics.Twall_top = 0.95 * q37.cs2;
    base.init = random_near_equilibrium(q37, 5, 0.01);
    base.schedule = Schedule::Staged;
    const RunResult ref = run(base);
    struct V {
      int np;
      Tiling t;
      Schedule s;
    };
    const V variants[] = {{1, Tiling::one_d(1), Schedule::Overlapped}, {4, Tiling::one_d(4), Schedule::Staged},
                          {4, Tiling::one_d(4), Schedule::Overlapped}, {4, Tiling::two_d(2, 2), Schedule::Staged},
                          {4, Tiling::two_d(2, 2), Schedule::Overlapped}, {8, Tiling::two_d(2, 4), Schedule::Staged},
                          {8, Tiling::two_d(2, 4), Schedule::Overlapped}};
    std::string detail;
    bool all = true;
    for (const V& v : variants) {
      SimulationConfig cfg = base;
      cfg.ranks = v.np;
      cfg.tiling = v.t;
      cfg.schedule = v.s;
      const bool same = identical(*ref.state, *run(cfg).state);
      all = all && same;
      if (!same) detail += " differs: " + to_string(v.t) + "/" + std::string(to_string(v.s));
    }
    return Outcome{all, "8 runs vs 1-rank staged" + (all ? std::string(", all bit-identical") : detail)};
  });

  criterion(6, "planner oracle", 5.0, [&] {
    const SuiteReport r = validate_planner_oracle(64, 20);
    std::string detail;
    for (const Check& c : r.checks) detail += (detail.empty() ? "" : ", ") + c.name + " " + sci(c.value);
    return Outcome{r.passed && r.checks.back().value <= kRealOptimumTol, detail};
  });

  criterion(7, "model limits", 0, [&] {
    double worst = 0;
    for (int np : {1, 2, 4, 16, 64, 256}) {
      CostModelInput in = CostModelInput::make(3600, 3600, np, 1e9, 1e9, 1e-8);
      for (double by : {1e20, 1e30, 1e300}) {
        in.By = by;
        worst = std::max(worst, std::abs(predict_1d_overlap(in).scale_violation - 1.0));
      }
    }
    bool rejected = false;
    try {
      predict_2d_overlap(CostModelInput::make(3600, 1800, 16, 1e9, 1e9, 1e-8));
    } catch (const UnsupportedCase&) {
      rejected = true;
    }
    int exact = 0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> w(1, 1000), n(1, 1e7), p(1, 4096);
    for (int i = 0; i < 10; ++i) {
      const double wi = w(rng), ni = std::round(n(rng)), pi = std::round(p(rng));
      if (brent_bound(wi, ni, pi) == wi * (1 + (ni - 1) / pi)) ++exact;
    }
    return Outcome{worst <= kScaleLimitTol && rejected && exact == 10,
                   "overlapped 1D scale violation at infinite By off by " + sci(worst) +
                       ", non-square overlapped 2D " + (rejected ? "rejected" : "accepted") + ", Brent " +
                       std::to_string(exact) + "/10 exact"};
  });

  criterion(8, "1D/2D crossover with measured bandwidths", 0, [&] {
    const BandwidthTable table = to_bandwidth_table(measured_halo());
    SimulationConfig cal;
    cal.Lx = cal.Ly = 128;
    cal.steps = 20;
    cal.gather_state = false;
    cal.schedule = Schedule::Staged;
    cal.init = uniform_equilibrium(q37, 1, 0, 0, q37.cs2);
    cal.physics.Twall_bot = cal.physics.Twall_top = q37.cs2;
    const RunResult r = run(cal);
    const double beta = r.wall_seconds / (double(r.sites) * r.steps);
    std::vector<int> nps(1024);
    for (int i = 0; i < 1024; ++i) nps[i] = i + 1;
    const CostModelInput in = CostModelInput::make(3600, 3600, 1, table.noncontiguous(208 * 3600.0),
                                                   table.contiguous(208 * 3600.0), beta);
    const auto cmp = compare_tilings(scaling_curve(in, nps, table));
    int first_1d_ok = 0, crossover = 0;
    for (const TilingComparison& c : cmp) {
      if (!c.has_2d) continue;
      const bool one_d_ok = c.best_1d.np_times_T <= c.best_2d.np_times_T;
      if (one_d_ok && !first_1d_ok) first_1d_ok = c.Np;
      if (one_d_ok) crossover = 0;
      if (!one_d_ok && !crossover) crossover = c.Np;
    }
    const bool ok = first_1d_ok > 0 && crossover > first_1d_ok;
    std::ostringstream d;
    d << "beta " << sci(beta) << " s/site; 1D <= 2D from Np=" << first_1d_ok << ", 2D wins for every Np >= "
      << crossover;
    return Outcome{ok, d.str()};
  });

  criterion(9, "Taylor-Green decay", 60.0, [&] {
    const DecayFit fit = taylor_green_decay(64, 2000, 0.8);
    return Outcome{fit.relative_error <= kDecayTol, "rate " + sci(fit.measured_rate) + " vs " +
                                                        sci(fit.expected_rate) + ", rel err " +
                                                        sci(fit.relative_error) + " (tol " + sci(kDecayTol) + ")"};
  });

  criterion(10, "bc contract", 0, [&] {
    PhysicsParams p;
    p.Twall_bot = 0.85;
    p.Twall_top = 0.62;
    std::mt19937_64 rng(10);
    PopulationField f(make_geometry(32, 32, 3, 3, q37, Layout::SoA, WallRows{true, true}), BufferRole::Prv);
    fill_random(f, q37, rng);
    const PopulationField before = f;
    bc(f, p, q37);
    double umax = 0, tmax = 0;
    bool interior_same = true;
    for (int x = 0; x < 32; ++x) {
      for (int y = 0; y < 32; ++y) {
        std::vector<double> site(q37.Q);
        for (int l = 0; l < q37.Q; ++l) site[l] = f(l, x, y);
        if (y < 3 || y >= 29) {
          const auto m = oracle::direct_moments(q37, site);
          umax = std::max(umax, std::hypot(m.ux, m.uy));
          tmax = std::max(tmax, std::abs(m.T - (y < 3 ? p.Twall_bot : p.Twall_top)));
        } else {
          for (int l = 0; l < q37.Q; ++l) interior_same = interior_same && same_bits(site[l], before(l, x, y));
        }
      }
    }
    return Outcome{umax < kWallVelocityTol && tmax < kWallTemperatureTol && interior_same,
                   "max wall |u| " + sci(umax) + ", max |T - Twall| " + sci(tmax) + ", interior " +
                       (interior_same ? "untouched" : "modified")};
  });

  criterion(11, "halo poisoning", 0, [&] {
    long long nan_sites = 0;
    std::string layouts;
    for (const auto& [np, tiling] : {std::pair{1, Tiling::one_d(1)}, std::pair{4, Tiling::one_d(4)},
                                     std::pair{4, Tiling::two_d(2, 2)}}) {
      SimulationConfig cfg;
      cfg.Lx = cfg.Ly = 64;
      cfg.model = "D2Q37";
      cfg.steps = 50;
      cfg.ranks = np;
      cfg.tiling = tiling;
      cfg.poison_halos = true;
      cfg.physics.gy = -1e-4;
      cfg.physics.Twall_bot = 1.05 * q37.cs2;
      cfg.physics.Twall_top = 0.95 * q37.cs2;
      cfg.init = random_near_equilibrium(q37, 11, 0.01);
      const RunResult r = run(cfg);
      const LatticeGeometry& g = r.state->geometry();
      for (int l = 0; l < g.Q; ++l) {
        for (int x = 0; x < g.Lx; ++x) {
          for (int y = 0; y < g.Ly; ++y) nan_sites += std::isnan((*r.state)(l, x, y));
        }
      }
      layouts += (layouts.empty() ? "" : ", ") + to_string(tiling);
    }
    return Outcome{nan_sites == 0, "50 poisoned steps on " + layouts + ": " + std::to_string(nan_sites) + " NaN"};
  });

  criterion(12, "halo bandwidth gate", 0, [&] {
    const auto& rows = measured_halo();
    bool ordered = true;
    std::ostringstream d;
    for (const HaloBenchRow& r : rows) {
      const double ratio = r.contiguous.metric / r.noncontiguous.metric;
      ordered = ordered && ratio >= 1.0 - kBandwidthMargin;
      d << r.edge << ":" << std::fixed;
      d.precision(2);
      d << ratio << " ";
    }
    const auto path = std::filesystem::temp_directory_path() / "tlbm_acceptance_bw.csv";
    to_bandwidth_table(rows).save_csv(path);
    const BandwidthTable back = BandwidthTable::load_csv(path);
    std::filesystem::remove(path);
    const CostModelInput in = CostModelInput::make(3600, 3600, 1, back.noncontiguous(1e5), back.contiguous(1e5), 1e-8);
    in.validate();
    const bool round_trip = back.rows().size() == rows.size() && !scaling_curve(in, {1, 16}, back).empty();
    return Outcome{ordered && round_trip, "contiguous/non-contiguous ratio per edge " + d.str() + "; table " +
                                              (round_trip ? "round-trips" : "fails to load")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
