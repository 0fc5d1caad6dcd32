#include "tlbm/kernels.hpp"

#include <cmath>
#include <string>

#include "tlbm/error.hpp"

namespace tlbm {

namespace {

constexpr int kMaxQ = 64;

void require_inside(const LatticeGeometry& g, const Region& r, const char* kernel) {
  if (r.empty()) return;
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > g.Lx || r.y1 > g.Ly) {
    throw ContractViolation(std::string(kernel) + ": region [" + std::to_string(r.x0) + ", " +
                            std::to_string(r.x1) + ") x [" + std::to_string(r.y0) + ", " +
                            std::to_string(r.y1) + ") extends outside the physical lattice");
  }
}

void require_same_shape(const LatticeGeometry& a, const LatticeGeometry& b, const char* kernel) {
  if (a.Lx != b.Lx || a.Ly != b.Ly || a.Hx != b.Hx || a.Hy != b.Hy || a.Q != b.Q || a.layout != b.layout) {
    throw ContractViolation(std::string(kernel) + ": prv and nxt have different shapes");
  }
}

int wall_depth(const VelocitySet& vs) { return vs.max_hop; }

}  // namespace

void PhysicsParams::validate() const {
  if (dt != 1.0) throw ConfigError("dt is fixed to 1 in lattice units");
  if (D != 2) throw ConfigError("only two-dimensional models are supported");
  if (!(tau > dt / 2)) {
    throw ConfigError("tau must exceed dt/2 for a stable BGK relaxation, got " + std::to_string(tau));
  }
  if (!(Twall_top > 0) || !(Twall_bot > 0)) throw ConfigError("wall temperatures must be positive");
  if (eq_order < 0 || eq_order > 4) throw ConfigError("equilibrium order must be in 0..4");
}

SiteMoments moments(std::span<const double> f, const VelocitySet& vs) {
  double rho = 0, jx = 0, jy = 0;
  for (int l = 0; l < vs.Q; ++l) {
    rho += f[l];
    jx += vs.c[l].x * f[l];
    jy += vs.c[l].y * f[l];
  }
  if (!std::isfinite(rho) || !std::isfinite(jx) || !std::isfinite(jy)) {
    throw DomainError("non-finite populations");
  }
  if (rho <= 0) throw DomainError("degenerate state: rho = " + std::to_string(rho));
  SiteMoments m;
  m.rho = rho;
  m.ux = jx / rho;
  m.uy = jy / rho;
  double e = 0;
  for (int l = 0; l < vs.Q; ++l) {
    const double dx = vs.c[l].x - m.ux;
    const double dy = vs.c[l].y - m.uy;
    e += (dx * dx + dy * dy) * f[l];
  }
  m.T = e / (2.0 * rho);
  return m;
}

ShiftedFields apply_shift(double ux, double uy, double T, const PhysicsParams& params) {
  ShiftedFields s;
  s.ux = ux + params.tau * params.gx;
  s.uy = uy + params.tau * params.gy;
  const double g2 = params.gx * params.gx + params.gy * params.gy;
  s.T = T - params.tau * params.tau * g2 / params.D;
  if (!(s.T > 0)) throw DomainError("shifted temperature is not positive: " + std::to_string(s.T));
  return s;
}

Equilibrium::Equilibrium(const VelocitySet& vs, int order)
    : order_(order == 0 ? vs.equilibrium_order : order), inv_sqrt_cs2_(1.0 / std::sqrt(vs.cs2)), cs2_(vs.cs2) {
  if (order_ < 1 || order_ > vs.equilibrium_order) {
    throw ConfigError("equilibrium order " + std::to_string(order_) + " not supported by " + vs.name +
                      " (max " + std::to_string(vs.equilibrium_order) + ")");
  }
  if (vs.Q > kMaxQ) throw ConfigError("velocity set too large");
  for (int l = 0; l < vs.Q; ++l) {
    const double xx = vs.c[l].x * inv_sqrt_cs2_;
    const double xy = vs.c[l].y * inv_sqrt_cs2_;
    const double xi2 = xx * xx + xy * xy;
    w_.push_back(vs.w[l]);
    xi_x_.push_back(xx);
    xi_y_.push_back(xy);
    xi2_m2_.push_back(xi2 - 2.0);
    xi2_m4_.push_back(xi2 - 4.0);
    xi2_m6_.push_back(xi2 - 6.0);
    quartic_.push_back(xi2 * xi2 - 8.0 * xi2 + 8.0);
  }
}

// Hermite expansion of rho/(2 pi T)^(D/2) exp(-|xi - u|^2 / 2T) around the
// lattice reference temperature cs2, D = 2. With U = u/sqrt(cs2),
// theta = T/cs2 - 1 and xi = c/sqrt(cs2), the contractions a(n):H(n) are
//   n=1: U.xi
//   n=2: (U.xi)^2 - U^2 + theta (xi^2 - 2)
//   n=3: (U.xi)^3 - 3 U^2 (U.xi) + 3 theta (U.xi)(xi^2 - 4)
//   n=4: (U.xi)^4 - 6 U^2 (U.xi)^2 + 3 U^4
//        + 6 theta [(U.xi)^2 (xi^2 - 6) - U^2 (xi^2 - 4)]
//        + 3 theta^2 (xi^4 - 8 xi^2 + 8)
void Equilibrium::evaluate(double rho, double ux, double uy, double T, double* out) const noexcept {
  const double Ux = ux * inv_sqrt_cs2_;
  const double Uy = uy * inv_sqrt_cs2_;
  const double u2 = Ux * Ux + Uy * Uy;
  const double th = T / cs2_ - 1.0;
  const int q = Q();
  for (int l = 0; l < q; ++l) {
    const double ue = Ux * xi_x_[l] + Uy * xi_y_[l];
    const double ue2 = ue * ue;
    double s = 1.0 + ue;
    if (order_ >= 2) s += 0.5 * (ue2 - u2 + th * xi2_m2_[l]);
    if (order_ >= 3) s += (ue2 * ue - 3.0 * u2 * ue + 3.0 * th * ue * xi2_m4_[l]) / 6.0;
    if (order_ >= 4) {
      s += (ue2 * ue2 - 6.0 * u2 * ue2 + 3.0 * u2 * u2 + 6.0 * th * (ue2 * xi2_m6_[l] - u2 * xi2_m4_[l]) +
            3.0 * th * th * quartic_[l]) /
           24.0;
    }
    out[l] = w_[l] * rho * s;
  }
}

void equilibrium(double rho, double ux, double uy, double T, const VelocitySet& vs, std::span<double> out,
                 int order) {
  if (!(rho > 0)) throw DomainError("equilibrium needs rho > 0, got " + std::to_string(rho));
  if (!(T > 0)) throw DomainError("equilibrium needs T > 0, got " + std::to_string(T));
  if (out.size() < static_cast<std::size_t>(vs.Q)) throw ContractViolation("equilibrium output too small");
  Equilibrium(vs, order).evaluate(rho, ux, uy, T, out.data());
}

std::vector<double> equilibrium(double rho, double ux, double uy, double T, const VelocitySet& vs, int order) {
  std::vector<double> out(vs.Q);
  equilibrium(rho, ux, uy, T, vs, out, order);
  return out;
}

Collider::Collider(const VelocitySet& vs, const PhysicsParams& params)
    : vs_(&vs), params_(params), eq_(vs, params.eq_order), omega_(params.dt / params.tau) {
  params_.validate();
}

int Collider::operator()(const double* f, double* out) const {
  const SiteMoments m = moments(std::span<const double>(f, vs_->Q), *vs_);
  const ShiftedFields s = apply_shift(m.ux, m.uy, m.T, params_);
  double feq[kMaxQ];
  eq_.evaluate(m.rho, s.ux, s.uy, s.T, feq);
  int negative = 0;
  for (int l = 0; l < vs_->Q; ++l) {
    out[l] = f[l] - omega_ * (f[l] - feq[l]);
    negative += out[l] < 0.0;
  }
  return negative;
}

void collide(std::span<const double> f, const PhysicsParams& params, const VelocitySet& vs, std::span<double> out) {
  if (f.size() < static_cast<std::size_t>(vs.Q) || out.size() < static_cast<std::size_t>(vs.Q)) {
    throw ContractViolation("collide: population vectors shorter than Q");
  }
  double tmp[kMaxQ];
  Collider(vs, params)(f.data(), tmp);
  for (int l = 0; l < vs.Q; ++l) out[l] = tmp[l];
}

void propagate(const PopulationField& prv, PopulationField& nxt, const VelocitySet& vs, const Region& region) {
  const LatticeGeometry& g = prv.geometry();
  require_same_shape(g, nxt.geometry(), "propagate");
  require_inside(g, region, "propagate");
  if (region.empty()) return;
  const std::ptrdiff_t sl = g.stride_l(), sx = g.stride_x(), sy = g.stride_y();
  const double* src = prv.raw();
  double* dst = nxt.raw();
  for (int l = 0; l < vs.Q; ++l) {
    const std::ptrdiff_t delta = -vs.c[l].x * sx - vs.c[l].y * sy;
    for (int x = region.x0; x < region.x1; ++x) {
      const std::ptrdiff_t base = l * sl + static_cast<std::ptrdiff_t>(x + g.Hx) * sx +
                                  static_cast<std::ptrdiff_t>(region.y0 + g.Hy) * sy;
#ifndef NDEBUG
      const std::ptrdiff_t first = base + delta;
      const std::ptrdiff_t last = base + delta + (region.y1 - region.y0 - 1) * sy;
      if (first < 0 || last < 0 || static_cast<std::size_t>(first) >= g.size() ||
          static_cast<std::size_t>(last) >= g.size()) {
        throw ContractViolation("propagate: stencil read outside the allocation");
      }
#endif
      const double* s = src + base + delta;
      double* d = dst + base;
      const int n = region.y1 - region.y0;
      for (int y = 0; y < n; ++y) d[y * sy] = s[y * sy];
    }
  }
}

void bc(PopulationField& field, const PhysicsParams& params, const VelocitySet& vs) {
  const LatticeGeometry& g = field.geometry();
  const Equilibrium eq(vs, params.eq_order);
  const int depth = wall_depth(vs);
  const std::ptrdiff_t sl = g.stride_l();
  double f[kMaxQ];
  auto apply = [&](const Region& r, double twall) {
    for (int x = r.x0; x < r.x1; ++x) {
      for (int y = r.y0; y < r.y1; ++y) {
        double* site = field.raw() + g.phys_offset(0, x, y);
        double rho = 0;
        for (int l = 0; l < vs.Q; ++l) rho += site[l * sl];
        if (!(rho > 0) || !std::isfinite(rho)) {
          throw StepError("bc: degenerate wall density " + std::to_string(rho), x + g.origin_x,
                          y + g.origin_y);
        }
        eq.evaluate(rho, 0.0, 0.0, twall, f);
        for (int l = 0; l < vs.Q; ++l) site[l * sl] = f[l];
      }
    }
  };
  apply(g.wall_region_bottom(depth), params.Twall_bot);
  apply(g.wall_region_top(depth), params.Twall_top);
}

KernelStats collide_region(PopulationField& field, const Collider& collider, const Region& region) {
  const LatticeGeometry& g = field.geometry();
  require_inside(g, region, "collide");
  KernelStats stats;
  if (region.empty()) return stats;
  const int Q = collider.velocity_set().Q;
  const std::ptrdiff_t sl = g.stride_l();
  double f[kMaxQ];
  double out[kMaxQ];
  for (int x = region.x0; x < region.x1; ++x) {
    for (int y = region.y0; y < region.y1; ++y) {
      double* site = field.raw() + g.phys_offset(0, x, y);
      for (int l = 0; l < Q; ++l) f[l] = site[l * sl];
      try {
        stats.negative_populations += collider(f, out);
      } catch (const DomainError& e) {
        throw StepError(std::string("collide: ") + e.what(), x + g.origin_x, y + g.origin_y);
      }
      for (int l = 0; l < Q; ++l) site[l * sl] = out[l];
    }
  }
  stats.sites = region.size();
  return stats;
}

KernelStats propagate_collide_fused(const PopulationField& prv, PopulationField& nxt, const Collider& collider,
                                    const Region& region) {
  const LatticeGeometry& g = prv.geometry();
  require_same_shape(g, nxt.geometry(), "propagate_collide_fused");
  require_inside(g, region, "propagate_collide_fused");
  const VelocitySet& vs = collider.velocity_set();
  const int depth = wall_depth(vs);
  if (region.overlaps(g.wall_region_bottom(depth)) || region.overlaps(g.wall_region_top(depth))) {
    throw ContractViolation("propagate_collide_fused: region overlaps bc rows");
  }
  KernelStats stats;
  if (region.empty()) return stats;
  const int Q = vs.Q;
  const std::ptrdiff_t sl = g.stride_l(), sx = g.stride_x(), sy = g.stride_y();
  std::ptrdiff_t gather[kMaxQ];
  for (int l = 0; l < Q; ++l) gather[l] = l * sl - vs.c[l].x * sx - vs.c[l].y * sy;
  const double* src = prv.raw();
  double f[kMaxQ];
  double out[kMaxQ];
  for (int x = region.x0; x < region.x1; ++x) {
    for (int y = region.y0; y < region.y1; ++y) {
      const std::ptrdiff_t site = static_cast<std::ptrdiff_t>(g.phys_offset(0, x, y));
      for (int l = 0; l < Q; ++l) f[l] = src[site + gather[l]];
      try {
        stats.negative_populations += collider(f, out);
      } catch (const DomainError& e) {
        throw StepError(std::string("collide: ") + e.what(), x + g.origin_x, y + g.origin_y);
      }
      double* d = nxt.raw() + site;
      for (int l = 0; l < Q; ++l) d[l * sl] = out[l];
    }
  }
  stats.sites = region.size();
  return stats;
}

}  // namespace tlbm
