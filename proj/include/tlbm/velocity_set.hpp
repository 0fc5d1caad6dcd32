#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace tlbm {

/// Integer lattice hop performed by one population per time step.
struct Hop {
  int x = 0;
  int y = 0;
  friend bool operator==(const Hop&, const Hop&) = default;
};

/// Discrete velocity stencil with its quadrature weights.
///
/// Weights are derived at construction by matching the even moments of a
/// Gaussian of variance `cs2` (see `derive_weights`). Velocities are stored
/// shell by shell, in increasing |c|^2.
struct VelocitySet {
  std::string name;
  int Q = 0;
  std::vector<Hop> c;
  std::vector<double> w;
  double cs2 = 0.0;
  int max_hop = 0;
  /// opposite[l] is the index l' with c[l'] == -c[l].
  std::vector<int> opposite;
  /// mirror_y[l] is the index l' with c[l'] == (c[l].x, -c[l].y).
  std::vector<int> mirror_y;
  /// Highest even moment order matched exactly by the weights.
  int moment_order = 0;
  /// Highest Hermite order the quadrature supports for the equilibrium.
  int equilibrium_order = 0;

  /// Index of the population with hop `h`, or -1.
  int index_of(Hop h) const noexcept;
};

/// Builds "D2Q37" or "D2Q9". Throws ConfigError for unknown names.
VelocitySet build_velocity_set(std::string_view name);

/// Weights of a stencil grouped into speed shells.
struct ShellSolution {
  double cs2 = 0.0;
  std::vector<double> shell_weights;
};

/// Moment-matching solve for shell weights.
///
/// `shells` lists one representative (a, b) per speed shell, a >= b >= 0; the
/// shell contains every signed permutation of it. The weights are chosen so
/// that sum_l w_l c_x^p c_y^q equals the Gaussian moment (p-1)!!(q-1)!! cs2^((p+q)/2)
/// for every even p, q with p + q <= max_order. With one more equation than
/// shell weights, the system is consistent only for particular cs2; the
/// positive root that yields all-positive weights is returned.
ShellSolution derive_weights(const std::vector<std::array<int, 2>>& shells, int max_order);

/// Raw moment sum_l w_l c_x^p c_y^q.
double lattice_moment(const VelocitySet& vs, int p, int q);

/// Gaussian moment <x^p y^q> of an isotropic 2D normal distribution with variance `var`.
double gaussian_moment(int p, int q, double var);

}  // namespace tlbm
