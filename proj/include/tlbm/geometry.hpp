#pragma once

#include <cstddef>
#include <string_view>

#include "tlbm/velocity_set.hpp"

namespace tlbm {

enum class Layout { SoA, AoS };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view text);

/// Which physical rows of a lattice (or tile) are wall rows handled by bc.
struct WallRows {
  bool bottom = false;  // rows y = 0 .. max_hop-1
  bool top = false;     // rows y = Ly-max_hop .. Ly-1
};

/// Axis-aligned set of physical sites, [x0, x1) x [y0, y1), physical coordinates.
struct Region {
  int x0 = 0;
  int x1 = 0;
  int y0 = 0;
  int y1 = 0;

  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
  long long size() const noexcept {
    return empty() ? 0 : static_cast<long long>(x1 - x0) * (y1 - y0);
  }
  bool overlaps(const Region& o) const noexcept {
    return !empty() && !o.empty() && x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
};

/// Physical extents plus halo frame, sites stored column-major along Y.
///
/// Physical site (x, y), 0 <= x < Lx, 0 <= y < Ly, lives at allocation
/// coordinates (x + Hx, y + Hy). Halo sites have negative physical
/// coordinates or coordinates >= Lx / Ly.
struct LatticeGeometry {
  int Lx = 0;
  int Ly = 0;
  int Hx = 0;
  int Hy = 0;
  int Q = 0;
  Layout layout = Layout::SoA;
  WallRows walls{};
  /// Global coordinates of physical site (0, 0); nonzero for rank tiles.
  int origin_x = 0;
  int origin_y = 0;

  int NX() const noexcept { return Hx + Lx + Hx; }
  int NY() const noexcept { return Hy + Ly + Hy; }
  std::size_t sites() const noexcept { return static_cast<std::size_t>(NX()) * NY(); }
  std::size_t size() const noexcept { return sites() * static_cast<std::size_t>(Q); }

  /// Offset increments for l, x, y (allocation coordinates). Both layouts are affine.
  std::ptrdiff_t stride_l() const noexcept {
    return layout == Layout::SoA ? static_cast<std::ptrdiff_t>(NX()) * NY() : 1;
  }
  std::ptrdiff_t stride_x() const noexcept {
    return layout == Layout::SoA ? NY() : static_cast<std::ptrdiff_t>(NY()) * Q;
  }
  std::ptrdiff_t stride_y() const noexcept { return layout == Layout::SoA ? 1 : Q; }

  /// Unchecked offset of population l at allocation coordinates (ax, ay).
  std::size_t offset(int l, int ax, int ay) const noexcept {
    return static_cast<std::size_t>(l * stride_l() + ax * stride_x() + ay * stride_y());
  }

  /// Unchecked offset of population l at physical coordinates (x, y), halos included.
  std::size_t phys_offset(int l, int x, int y) const noexcept { return offset(l, x + Hx, y + Hy); }

  Region physical() const noexcept { return {0, Lx, 0, Ly}; }
  /// Rows handled by bc on this lattice; empty region when the side has no wall.
  Region wall_region_bottom(int depth) const noexcept;
  Region wall_region_top(int depth) const noexcept;
};

/// Validates extents and halo thickness against the stencil and builds the geometry.
/// Throws ConfigError on degenerate extents or halos thinner than max_hop,
/// AllocationError if the allocation size would overflow.
LatticeGeometry make_geometry(int Lx, int Ly, int Hx, int Hy, const VelocitySet& vs,
                              Layout layout = Layout::SoA, WallRows walls = {});

/// Checked storage offset of (l, x, y) in allocation coordinates.
/// Throws ContractViolation when out of range.
std::size_t site_index(const LatticeGeometry& geom, int l, int x, int y);

}  // namespace tlbm
