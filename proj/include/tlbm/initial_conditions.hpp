#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "tlbm/kernels.hpp"
#include "tlbm/velocity_set.hpp"

namespace tlbm {

/// Writes the Q initial populations of global site (x, y).
/// Must depend only on the global coordinates so every decomposition starts
/// from the same state.
using InitFn = std::function<void(int x, int y, std::span<double> f)>;

/// Equilibrium at rho, u = (ux, uy), temperature T everywhere.
InitFn uniform_equilibrium(const VelocitySet& vs, double rho, double ux, double uy, double T, int eq_order = 0);

/// Equilibrium at (rho0, u0, T0) plus a relative per-population perturbation of
/// size `amplitude`, deterministic in (seed, x, y, l).
InitFn random_near_equilibrium(const VelocitySet& vs, std::uint64_t seed, double amplitude, double rho0 = 1.0,
                               double ux0 = 0.0, double uy0 = 0.0, double T0 = 0.0, int eq_order = 0);

/// Decaying Taylor-Green vortex on a periodic Lx x Ly lattice, velocity amplitude u0,
/// at T = cs2, with the matching pressure perturbation.
InitFn taylor_green(const VelocitySet& vs, int Lx, int Ly, double u0, int eq_order = 0);

/// Cold heavy fluid over hot light fluid at rest, interface at Ly/2 displaced by
/// amplitude * cos(2 pi x / Lx) and smoothed over `width` sites; pressure rho T is
/// uniform at mid height and hydrostatic in y.
struct RayleighTaylorParams {
  double T_hot = 1.0;
  double T_cold = 0.8;
  double amplitude = 2.0;
  double width = 1.5;
  double pressure = 1.0;
  /// Vertical gravity; the initial pressure profile balances it column by column.
  double gravity = 0.0;
};
InitFn rayleigh_taylor(const VelocitySet& vs, int Lx, int Ly, const RayleighTaylorParams& p, int eq_order = 0);

/// Deterministic uniform double in [0, 1) from a 64-bit key (splitmix64).
double hash_uniform(std::uint64_t key);

}  // namespace tlbm
