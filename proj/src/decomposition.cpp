#include "tlbm/decomposition.hpp"

#include <sstream>

#include "tlbm/error.hpp"

namespace tlbm {

namespace {

std::string divisors_of(int n, int min_tile) {
  std::ostringstream s;
  bool first = true;
  for (int d = 1; d <= n; ++d) {
    if (n % d == 0 && n / d >= min_tile) {
      s << (first ? "" : ", ") << d;
      first = false;
    }
  }
  return s.str();
}

}  // namespace

std::string to_string(const Tiling& t) {
  if (t.kind == TilingKind::OneD) return "1d(" + std::to_string(t.nx) + ")";
  return "2d(" + std::to_string(t.nx) + "x" + std::to_string(t.ny) + ")";
}

std::vector<TileAssignment> decompose(int Lx, int Ly, int Np, const Tiling& tiling, bool periodic_y,
                                      int min_extent) {
  if (Lx <= 0 || Ly <= 0) throw ConfigError("lattice extents must be positive");
  if (Np < 1) throw ConfigError("rank count must be positive");
  int nx = tiling.nx;
  int ny = tiling.ny;
  if (tiling.kind == TilingKind::OneD) {
    nx = Np;
    ny = 1;
  }
  if (nx < 1 || ny < 1 || nx * ny != Np) {
    throw ConfigError("rank grid " + std::to_string(nx) + "x" + std::to_string(ny) + " does not hold " +
                      std::to_string(Np) + " ranks");
  }
  const int min_tile = 2 * min_extent;
  if (Lx % nx != 0 || Lx / nx < min_tile) {
    throw ConfigError("Lx = " + std::to_string(Lx) + " cannot be split into " + std::to_string(nx) +
                      " equal tiles of at least " + std::to_string(min_tile) +
                      " columns; valid X splits: " + divisors_of(Lx, min_tile));
  }
  if (Ly % ny != 0 || Ly / ny < min_tile) {
    throw ConfigError("Ly = " + std::to_string(Ly) + " cannot be split into " + std::to_string(ny) +
                      " equal tiles of at least " + std::to_string(min_tile) +
                      " rows; valid Y splits: " + divisors_of(Ly, min_tile));
  }
  const int lx = Lx / nx;
  const int ly = Ly / ny;
  std::vector<TileAssignment> tiles;
  tiles.reserve(Np);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      TileAssignment t;
      t.rank = ix + nx * iy;
      t.nx = nx;
      t.ny = ny;
      t.ix = ix;
      t.iy = iy;
      t.x0 = ix * lx;
      t.y0 = iy * ly;
      t.lx = lx;
      t.ly = ly;
      t.left = (ix + nx - 1) % nx + nx * iy;
      t.right = (ix + 1) % nx + nx * iy;
      t.lowermost = !periodic_y && iy == 0;
      t.uppermost = !periodic_y && iy == ny - 1;
      if (periodic_y) {
        t.down = ix + nx * ((iy + ny - 1) % ny);
        t.up = ix + nx * ((iy + 1) % ny);
      } else {
        t.down = t.lowermost ? -1 : ix + nx * (iy - 1);
        t.up = t.uppermost ? -1 : ix + nx * (iy + 1);
      }
      tiles.push_back(t);
    }
  }
  return tiles;
}

}  // namespace tlbm
