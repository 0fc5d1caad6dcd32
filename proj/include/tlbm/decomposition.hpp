#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tlbm {

enum class TilingKind { OneD, TwoD };

struct Tiling {
  TilingKind kind = TilingKind::OneD;
  int nx = 1;
  int ny = 1;

  static Tiling one_d(int np) { return {TilingKind::OneD, np, 1}; }
  static Tiling two_d(int nx, int ny) { return {TilingKind::TwoD, nx, ny}; }
  int ranks() const noexcept { return nx * ny; }
};

std::string to_string(const Tiling& t);

/// Tile owned by one rank. X neighbours form a ring; Y neighbours a chain that
/// ends at the walls (or a ring when the lattice is periodic in Y).
struct TileAssignment {
  int rank = 0;
  int nx = 1;
  int ny = 1;
  int ix = 0;  // grid coordinates of the tile
  int iy = 0;
  int x0 = 0;  // global coordinates of the first physical site
  int y0 = 0;
  int lx = 0;  // tile extents
  int ly = 0;
  int left = 0;
  int right = 0;
  int down = -1;  // -1: wall below
  int up = -1;    // -1: wall above
  bool lowermost = false;
  bool uppermost = false;
};

/// Splits Lx x Ly over the rank grid. Rank ids are ix + nx * iy.
/// Throws ConfigError (listing valid choices) when the extents are not divisible
/// or a tile would be narrower than 2 * min_extent.
std::vector<TileAssignment> decompose(int Lx, int Ly, int Np, const Tiling& tiling, bool periodic_y = false,
                                      int min_extent = 3);

}  // namespace tlbm
