#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "tlbm/error.hpp"
#include "tlbm/kernels.hpp"

using namespace tlbm;

namespace {

void fill_random(PopulationField& f, const VelocitySet& vs, std::mt19937_64& rng, double spread = 0.05) {
  std::uniform_real_distribution<double> u(-1, 1);
  const auto feq = equilibrium(1.0, 0.02, -0.01, vs.cs2, vs);
  const LatticeGeometry& g = f.geometry();
  for (int l = 0; l < vs.Q; ++l) {
    for (int x = -g.Hx; x < g.Lx + g.Hx; ++x) {
      for (int y = -g.Hy; y < g.Ly + g.Hy; ++y) f(l, x, y) = feq[l] * (1 + spread * u(rng));
    }
  }
}

void wrap_halos(PopulationField& f) {
  const LatticeGeometry& g = f.geometry();
  for (int l = 0; l < g.Q; ++l) {
    for (int x = -g.Hx; x < g.Lx + g.Hx; ++x) {
      for (int y = -g.Hy; y < g.Ly + g.Hy; ++y) {
        if (x >= 0 && x < g.Lx && y >= 0 && y < g.Ly) continue;
        f(l, x, y) = f(l, (x + g.Lx) % g.Lx, (y + g.Ly) % g.Ly);
      }
    }
  }
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("closed-form equilibrium equals the tensor Hermite expansion") {
  struct State {
    double rho, ux, uy, Tscale;
  };
  const State states[] = {{1.0, 0, 0, 1.0}, {1.2, 0.1, -0.05, 1.0}, {0.8, -0.07, 0.12, 1.3}, {1.1, 0.02, 0.2, 0.85}};
  for (const char* name : {"D2Q37", "D2Q9"}) {
    const VelocitySet vs = build_velocity_set(name);
    for (const State& s : states) {
      const double T = s.Tscale * vs.cs2;
      const auto got = equilibrium(s.rho, s.ux, s.uy, T, vs);
      const auto want = oracle::hermite_equilibrium(vs, s.rho, s.ux, s.uy, T, vs.equilibrium_order);
      for (int l = 0; l < vs.Q; ++l) CHECK(std::abs(got[l] - want[l]) < 1e-15);
      for (int order = 1; order <= vs.equilibrium_order; ++order) {
        const auto g2 = equilibrium(s.rho, s.ux, s.uy, T, vs, order);
        const auto w2 = oracle::hermite_equilibrium(vs, s.rho, s.ux, s.uy, T, order);
        for (int l = 0; l < vs.Q; ++l) CHECK(std::abs(g2[l] - w2[l]) < 1e-15);
      }
    }
  }
}

TEST_CASE("D2Q37 equilibrium carries the prescribed moments") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  const auto f = equilibrium(1.3, 0.08, -0.04, 0.9, vs);
  const auto m = oracle::direct_moments(vs, f);
  CHECK(m.rho == doctest::Approx(1.3).epsilon(1e-13));
  CHECK(m.ux == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(m.uy == doctest::Approx(-0.04).epsilon(1e-12));
  CHECK(m.T == doctest::Approx(0.9).epsilon(1e-12));
  const SiteMoments s = moments(f, vs);
  CHECK(s.T == doctest::Approx(m.T).epsilon(1e-14));
}

TEST_CASE("moments and equilibrium reject degenerate input") {
  const VelocitySet vs = build_velocity_set("D2Q9");
  std::vector<double> f(9, 0.0);
  CHECK_THROWS_AS(moments(f, vs), DomainError);
  f.assign(9, 0.1);
  f[3] = NAN;
  CHECK_THROWS_AS(moments(f, vs), DomainError);
  CHECK_THROWS_AS(equilibrium(-1.0, 0, 0, 0.3, vs), DomainError);
  CHECK_THROWS_AS(equilibrium(1.0, 0, 0, 0.0, vs), DomainError);
}

TEST_CASE("shift of velocity and temperature") {
  PhysicsParams p;
  p.tau = 0.8;
  p.gx = 1e-3;
  p.gy = -2e-3;
  const ShiftedFields s = apply_shift(0.1, 0.2, 0.7, p);
  CHECK(s.ux == doctest::Approx(0.1 + 0.8e-3));
  CHECK(s.uy == doctest::Approx(0.2 - 1.6e-3));
  CHECK(s.T == doctest::Approx(0.7 - 0.64 * 5e-6 / 2));
  p.gx = 10;
  CHECK_THROWS_AS(apply_shift(0, 0, 0.7, p), DomainError);
}

TEST_CASE("collision conserves mass, momentum and energy without forcing") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  PhysicsParams p;
  p.tau = 0.7;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  auto f = equilibrium(1.1, 0.05, 0.03, 0.75, vs);
  for (double& v : f) v *= 1 + 0.1 * u(rng);
  std::vector<double> out(vs.Q);
  collide(f, p, vs, out);
  const auto a = oracle::direct_moments(vs, f);
  const auto b = oracle::direct_moments(vs, out);
  CHECK(std::abs(a.rho - b.rho) < 1e-14);
  CHECK(std::abs(a.ux - b.ux) < 1e-14);
  CHECK(std::abs(a.uy - b.uy) < 1e-14);
  CHECK(std::abs(a.T - b.T) < 1e-13);
}

TEST_CASE("forcing adds rho g per step to the momentum") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  PhysicsParams p;
  p.tau = 0.9;
  p.gy = -1e-3;
  const auto f = equilibrium(1.2, 0.0, 0.0, 0.7, vs);
  std::vector<double> out(vs.Q);
  collide(f, p, vs, out);
  const auto m = oracle::direct_moments(vs, out);
  CHECK(m.rho == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(m.uy == doctest::Approx(-1e-3).epsilon(1e-10));
  CHECK(std::abs(m.ux) < 1e-15);
}

TEST_CASE("collision with tau = 1 lands on the shifted equilibrium") {
  const VelocitySet vs = build_velocity_set("D2Q9");
  PhysicsParams p;
  std::vector<double> f(9, 1.0 / 9), out(9);
  f[1] = 0.2;
  collide(f, p, vs, out);
  const SiteMoments m = moments(f, vs);
  const auto feq = equilibrium(m.rho, m.ux, m.uy, m.T, vs);
  for (int l = 0; l < 9; ++l) CHECK(out[l] == doctest::Approx(feq[l]).epsilon(1e-15));
}

TEST_CASE("propagate is a pull permutation") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  std::mt19937_64 rng(11);
  for (Layout layout : {Layout::SoA, Layout::AoS}) {
    FieldPair fp = allocate_field(make_geometry(12, 10, 3, 3, vs, layout));
    fill_random(fp.prv(), vs, rng);
    wrap_halos(fp.prv());
    propagate(fp.prv(), fp.nxt(), vs, fp.nxt().geometry().physical());
    std::vector<double> before, after;
    for (int l = 0; l < vs.Q; ++l) {
      for (int x = 0; x < 12; ++x) {
        for (int y = 0; y < 10; ++y) {
          const int sx = ((x - vs.c[l].x) % 12 + 12) % 12, sy = ((y - vs.c[l].y) % 10 + 10) % 10;
          CHECK(same_bits(fp.nxt()(l, x, y), fp.prv()(l, sx, sy)));
          before.push_back(fp.prv()(l, x, y));
          after.push_back(fp.nxt()(l, x, y));
        }
      }
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    CHECK(before == after);
  }
}

TEST_CASE("kernel regions must stay inside the lattice") {
  const VelocitySet vs = build_velocity_set("D2Q9");
  FieldPair fp = allocate_field(make_geometry(6, 6, 1, 1, vs));
  CHECK_THROWS_AS(propagate(fp.prv(), fp.nxt(), vs, Region{0, 7, 0, 6}), ContractViolation);
  const Collider c(vs, PhysicsParams{});
  CHECK_THROWS_AS(collide_region(fp.nxt(), c, Region{-1, 6, 0, 6}), ContractViolation);
}

TEST_CASE("fused propagate-collide equals the staged kernels bit for bit") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  PhysicsParams p;
  p.tau = 0.75;
  p.gy = -1e-4;
  const Collider c(vs, p);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const LatticeGeometry g = make_geometry(16, 16, 3, 3, vs, trial % 2 ? Layout::AoS : Layout::SoA);
    PopulationField prv(g, BufferRole::Prv), a(g, BufferRole::Nxt), b(g, BufferRole::Nxt);
    fill_random(prv, vs, rng);
    const KernelStats fs = propagate_collide_fused(prv, a, c, g.physical());
    propagate(prv, b, vs, g.physical());
    const KernelStats ss = collide_region(b, c, g.physical());
    CHECK(fs.negative_populations == ss.negative_populations);
    for (int l = 0; l < vs.Q; ++l) {
      for (int x = 0; x < 16; ++x) {
        for (int y = 0; y < 16; ++y) CHECK(same_bits(a(l, x, y), b(l, x, y)));
      }
    }
  }
}

TEST_CASE("fused kernel refuses wall rows") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  const LatticeGeometry g = make_geometry(16, 16, 3, 3, vs, Layout::SoA, WallRows{true, false});
  PopulationField prv(g, BufferRole::Prv), nxt(g, BufferRole::Nxt);
  const Collider c(vs, PhysicsParams{});
  CHECK_THROWS_AS(propagate_collide_fused(prv, nxt, c, Region{0, 16, 2, 8}), ContractViolation);
}

TEST_CASE("bc imposes zero velocity and wall temperature on the wall rows only") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  PhysicsParams p;
  p.Twall_bot = 0.9;
  p.Twall_top = 0.6;
  std::mt19937_64 rng(17);
  PopulationField f(make_geometry(10, 12, 3, 3, vs, Layout::SoA, WallRows{true, true}), BufferRole::Prv);
  fill_random(f, vs, rng);
  const PopulationField before = f;
  bc(f, p, vs);
  for (int x = 0; x < 10; ++x) {
    for (int y = 0; y < 12; ++y) {
      std::vector<double> site(vs.Q), old(vs.Q);
      for (int l = 0; l < vs.Q; ++l) {
        site[l] = f(l, x, y);
        old[l] = before(l, x, y);
      }
      if (y < 3 || y >= 9) {
        const auto m = oracle::direct_moments(vs, site);
        const auto m0 = oracle::direct_moments(vs, old);
        CHECK(std::hypot(m.ux, m.uy) < 1e-14);
        CHECK(std::abs(m.T - (y < 3 ? 0.9 : 0.6)) < 1e-12);
        CHECK(m.rho == doctest::Approx(m0.rho).epsilon(1e-14));
      } else {
        for (int l = 0; l < vs.Q; ++l) CHECK(same_bits(site[l], old[l]));
      }
    }
  }
}

TEST_CASE("a degenerate site reports its global coordinates") {
  const VelocitySet vs = build_velocity_set("D2Q9");
  LatticeGeometry g = make_geometry(4, 4, 1, 1, vs);
  g.origin_x = 100;
  g.origin_y = 50;
  PopulationField f(g, BufferRole::Prv);
  f.fill(0.1);
  for (int l = 0; l < 9; ++l) f(l, 2, 3) = -0.1;
  const Collider c(vs, PhysicsParams{});
  try {
    collide_region(f, c, g.physical());
    FAIL("expected StepError");
  } catch (const StepError& e) {
    CHECK(e.x() == 102);
    CHECK(e.y() == 53);
  }
}

TEST_CASE("physics parameters are validated") {
  PhysicsParams p;
  p.tau = 0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.tau = 1.0;
  p.Twall_top = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
