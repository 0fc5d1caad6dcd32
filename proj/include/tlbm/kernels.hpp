#pragma once

#include <span>
#include <vector>

#include "tlbm/field.hpp"
#include "tlbm/velocity_set.hpp"

namespace tlbm {

/// Physical parameters of the BGK evolution, lattice units (dt = 1).
struct PhysicsParams {
  double tau = 1.0;
  double gx = 0.0;
  double gy = 0.0;
  double dt = 1.0;
  int D = 2;
  double Twall_top = 1.0;
  double Twall_bot = 1.0;
  /// Hermite order of the equilibrium; 0 selects the stencil's highest supported order.
  int eq_order = 0;

  /// Throws ConfigError unless tau > dt/2, D == 2 and dt == 1.
  void validate() const;
};

struct SiteMoments {
  double rho = 0.0;
  double ux = 0.0;
  double uy = 0.0;
  double T = 0.0;
};

/// rho = sum f, rho u = sum c f, D rho T = sum |c - u|^2 f.
/// Throws DomainError when rho <= 0 or the populations are not finite.
SiteMoments moments(std::span<const double> f, const VelocitySet& vs);

/// Shifted velocity and temperature entering the equilibrium.
struct ShiftedFields {
  double ux = 0.0;
  double uy = 0.0;
  double T = 0.0;
};

/// u + tau g and T - tau^2 |g|^2 / D. Throws DomainError when the shifted T is not positive.
ShiftedFields apply_shift(double ux, double uy, double T, const PhysicsParams& params);

/// Precomputed per-population factors of the Hermite-expanded equilibrium.
class Equilibrium {
 public:
  Equilibrium(const VelocitySet& vs, int order);

  int order() const noexcept { return order_; }
  int Q() const noexcept { return static_cast<int>(w_.size()); }

  /// Writes f_eq for (rho, u, T) into out[0..Q). No domain checks.
  void evaluate(double rho, double ux, double uy, double T, double* out) const noexcept;

 private:
  int order_;
  double inv_sqrt_cs2_;
  double cs2_;
  std::vector<double> w_, xi_x_, xi_y_, xi2_m2_, xi2_m4_, xi2_m6_, quartic_;
};

/// Discrete projection of the shifted Maxwellian, truncated at `order`
/// (0 selects the stencil's default). Throws DomainError unless rho > 0 and T > 0.
void equilibrium(double rho, double ux, double uy, double T, const VelocitySet& vs, std::span<double> out,
                 int order = 0);
std::vector<double> equilibrium(double rho, double ux, double uy, double T, const VelocitySet& vs,
                                int order = 0);

/// Site-local BGK relaxation of a gathered population vector.
class Collider {
 public:
  Collider(const VelocitySet& vs, const PhysicsParams& params);

  /// out_l = f_l - (dt/tau)(f_l - f_eq,l(rho, u_bar, T_bar)). Returns the number of
  /// negative outputs. Throws DomainError on degenerate moments.
  int operator()(const double* f, double* out) const;

  const VelocitySet& velocity_set() const noexcept { return *vs_; }
  const PhysicsParams& params() const noexcept { return params_; }
  const Equilibrium& equilibrium() const noexcept { return eq_; }

 private:
  const VelocitySet* vs_;
  PhysicsParams params_;
  Equilibrium eq_;
  double omega_;
};

/// Collision of one site. `out` may alias `f`.
void collide(std::span<const double> f, const PhysicsParams& params, const VelocitySet& vs,
             std::span<double> out);

struct KernelStats {
  long long sites = 0;
  long long negative_populations = 0;

  KernelStats& operator+=(const KernelStats& o) noexcept {
    sites += o.sites;
    negative_populations += o.negative_populations;
    return *this;
  }
};

/// Pull streaming: nxt_l(x, y) = prv_l(x - c_lx, y - c_ly) for every site in `region`.
/// Throws ContractViolation if `region` leaves the physical lattice.
void propagate(const PopulationField& prv, PopulationField& nxt, const VelocitySet& vs, const Region& region);

/// Replaces the populations of the wall rows (max_hop rows next to each wall
/// flagged in the geometry) by f_eq(rho_local, 0, T_wall).
void bc(PopulationField& field, const PhysicsParams& params, const VelocitySet& vs);

/// In-place collision of the gathered populations over `region`.
KernelStats collide_region(PopulationField& field, const Collider& collider, const Region& region);

/// Gather + collide per site, writing nxt. Bit-identical to propagate followed by
/// collide_region. Throws ContractViolation if `region` touches wall rows.
KernelStats propagate_collide_fused(const PopulationField& prv, PopulationField& nxt, const Collider& collider,
                                    const Region& region);

}  // namespace tlbm
