#pragma once

#include <filesystem>
#include <vector>

#include "tlbm/field.hpp"
#include "tlbm/velocity_set.hpp"

namespace tlbm {

/// Density, velocity and temperature per physical site, row-major (index y * Lx + x).
struct MacroFields {
  int Lx = 0;
  int Ly = 0;
  std::vector<double> rho, ux, uy, T;

  MacroFields() = default;
  MacroFields(int lx, int ly);

  std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * Lx + x; }
};

/// First-approximation moments at every physical site of `field`.
MacroFields compute_macro_fields(const PopulationField& field, const VelocitySet& vs);

/// CSV with header "x,y,rho,ux,uy,T", one row per site, y-major then x.
void write_macro_csv(const MacroFields& m, const std::filesystem::path& path);

/// Binary PGM (P5), 8-bit, temperature min-max normalised; row 0 of the
/// image is the top of the lattice (largest y).
void write_temperature_pgm(const MacroFields& m, const std::filesystem::path& path);

}  // namespace tlbm
