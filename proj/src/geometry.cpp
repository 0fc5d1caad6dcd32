#include "tlbm/geometry.hpp"

#include <limits>
#include <string>

#include "tlbm/error.hpp"

namespace tlbm {

std::string_view to_string(Layout layout) { return layout == Layout::SoA ? "soa" : "aos"; }

Layout parse_layout(std::string_view text) {
  if (text == "soa" || text == "SoA" || text == "SOA") return Layout::SoA;
  if (text == "aos" || text == "AoS" || text == "AOS") return Layout::AoS;
  throw ConfigError("unknown layout '" + std::string(text) + "' (expected soa or aos)");
}

Region LatticeGeometry::wall_region_bottom(int depth) const noexcept {
  if (!walls.bottom) return {};
  return {0, Lx, 0, depth < Ly ? depth : Ly};
}

Region LatticeGeometry::wall_region_top(int depth) const noexcept {
  if (!walls.top) return {};
  return {0, Lx, depth < Ly ? Ly - depth : 0, Ly};
}

LatticeGeometry make_geometry(int Lx, int Ly, int Hx, int Hy, const VelocitySet& vs, Layout layout,
                              WallRows walls) {
  if (Lx <= 0 || Ly <= 0) {
    throw ConfigError("lattice extents must be positive, got " + std::to_string(Lx) + " x " +
                      std::to_string(Ly));
  }
  if (Hx < vs.max_hop || Hy < vs.max_hop) {
    throw ConfigError("halo thickness (" + std::to_string(Hx) + ", " + std::to_string(Hy) +
                      ") is thinner than the stencil reach " + std::to_string(vs.max_hop));
  }
  const auto nx = static_cast<unsigned long long>(Hx) * 2 + static_cast<unsigned long long>(Lx);
  const auto ny = static_cast<unsigned long long>(Hy) * 2 + static_cast<unsigned long long>(Ly);
  const auto limit = static_cast<unsigned long long>(std::numeric_limits<std::ptrdiff_t>::max()) /
                     sizeof(double);
  if (nx > static_cast<unsigned long long>(std::numeric_limits<int>::max()) ||
      ny > static_cast<unsigned long long>(std::numeric_limits<int>::max()) || nx > limit / ny ||
      nx * ny > limit / static_cast<unsigned long long>(vs.Q)) {
    throw AllocationError("lattice allocation of " + std::to_string(nx) + " x " + std::to_string(ny) +
                          " sites overflows the addressable size");
  }
  LatticeGeometry g;
  g.Lx = Lx;
  g.Ly = Ly;
  g.Hx = Hx;
  g.Hy = Hy;
  g.Q = vs.Q;
  g.layout = layout;
  g.walls = walls;
  return g;
}

std::size_t site_index(const LatticeGeometry& geom, int l, int x, int y) {
  if (l < 0 || l >= geom.Q || x < 0 || x >= geom.NX() || y < 0 || y >= geom.NY()) {
    throw ContractViolation("site_index out of range: (l=" + std::to_string(l) + ", x=" +
                            std::to_string(x) + ", y=" + std::to_string(y) + ")");
  }
  return geom.offset(l, x, y);
}

}  // namespace tlbm
