#include "tlbm/initial_conditions.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace tlbm {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double hash_uniform(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

InitFn uniform_equilibrium(const VelocitySet& vs, double rho, double ux, double uy, double T, int eq_order) {
  auto feq = std::make_shared<std::vector<double>>(equilibrium(rho, ux, uy, T, vs, eq_order));
  return [feq](int, int, std::span<double> f) { std::copy(feq->begin(), feq->end(), f.begin()); };
}

InitFn random_near_equilibrium(const VelocitySet& vs, std::uint64_t seed, double amplitude, double rho0, double ux0,
                               double uy0, double T0, int eq_order) {
  const double T = T0 > 0 ? T0 : vs.cs2;
  auto feq = std::make_shared<std::vector<double>>(equilibrium(rho0, ux0, uy0, T, vs, eq_order));
  const int Q = vs.Q;
  return [feq, seed, amplitude, Q](int x, int y, std::span<double> f) {
    const std::uint64_t site = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                               static_cast<std::uint32_t>(y);
    for (int l = 0; l < Q; ++l) {
      const double r = hash_uniform(splitmix64(seed) ^ splitmix64(site * 64 + static_cast<std::uint64_t>(l)));
      f[l] = (*feq)[l] * (1.0 + amplitude * (2.0 * r - 1.0));
    }
  };
}

InitFn taylor_green(const VelocitySet& vs, int Lx, int Ly, double u0, int eq_order) {
  const double kx = 2.0 * std::numbers::pi / Lx;
  const double ky = 2.0 * std::numbers::pi / Ly;
  const double cs2 = vs.cs2;
  const VelocitySet* set = &vs;
  return [=](int x, int y, std::span<double> f) {
    const double ux = -u0 * std::sqrt(ky / kx) * std::cos(kx * x) * std::sin(ky * y);
    const double uy = u0 * std::sqrt(kx / ky) * std::sin(kx * x) * std::cos(ky * y);
    const double p = -0.25 * u0 * u0 * (ky / kx * std::cos(2 * kx * x) + kx / ky * std::cos(2 * ky * y));
    const double rho = 1.0 + p / cs2;
    equilibrium(rho, ux, uy, cs2, *set, f, eq_order);
  };
}

InitFn rayleigh_taylor(const VelocitySet& vs, int Lx, int Ly, const RayleighTaylorParams& p, int eq_order) {
  const VelocitySet* set = &vs;
  const double a = 0.5 * (p.T_hot + p.T_cold), b = 0.5 * (p.T_hot - p.T_cold);
  // Antiderivative of 1/T(y) for T = a - b tanh((y - y0)/w), overflow-free for large |z|.
  auto inv_T_integral = [=](double z) {
    const double lc = z > 0 ? z + std::log(0.5 * ((a - b) + (a + b) * std::exp(-2 * z)))
                            : -z + std::log(0.5 * ((a - b) * std::exp(2 * z) + (a + b)));
    return p.width * (a * z + b * lc) / (a * a - b * b);
  };
  return [=](int x, int y, std::span<double> f) {
    const double interface = 0.5 * Ly + p.amplitude * std::cos(2.0 * std::numbers::pi * (x + 0.5) / Lx);
    const double z = (y + 0.5 - interface) / p.width;
    const double T = a - b * std::tanh(z);
    // Hydrostatic column, dp/dy = rho g with p = rho T; p equals `pressure` at mid height.
    const double zmid = (0.5 * Ly - interface) / p.width;
    const double pressure = p.pressure * std::exp(p.gravity * (inv_T_integral(z) - inv_T_integral(zmid)));
    equilibrium(pressure / T, 0.0, 0.0, T, *set, f, eq_order);
  };
}

}  // namespace tlbm
