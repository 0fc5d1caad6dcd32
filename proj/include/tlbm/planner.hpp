#pragma once

#include <string>
#include <vector>

#include "tlbm/bandwidth_table.hpp"

namespace tlbm {

/// Inputs of the communication / scaling cost model.
///
/// Bandwidth naming follows the traffic, not the neighbour direction: `By`
/// moves faces whose edge runs along Y (length Ly/ny, the left/right halos,
/// contiguous in the column-major layout); `Bx` moves faces whose edge runs
/// along X (length Lx/nx, top/bottom halos, non-contiguous).
struct CostModelInput {
  double N = 0;      // total sites, Lx * Ly
  double Lx = 0;
  double Ly = 0;
  int Np = 1;
  double Bx = 0;     // bytes/s
  double By = 0;     // bytes/s
  double beta = 0;   // seconds per site update on one processor
  double S = 208;    // bytes per boundary site

  static CostModelInput make(double Lx, double Ly, int Np, double Bx, double By, double beta, double S = 208);

  /// Throws ConfigError unless every field is strictly positive (S may be 0) and N = Lx * Ly.
  void validate() const;
};

struct Prediction {
  double T_total = 0;
  double T_C = 0;
  double T_P = 0;
  double nx = 0;
  double ny = 0;
  /// T_total * Np / (beta * N); 1 at perfect scaling.
  double scale_violation = 0;
};

struct RealGrid {
  double nx = 0;
  double ny = 0;
};

struct Grid {
  int nx = 0;
  int ny = 0;
  friend bool operator==(const Grid&, const Grid&) = default;
};

/// d * Np^(1/d). Throws ContractViolation unless d is 1 or 2 and Np >= 1.
double surface_over_volume(int Np, int d);

/// S * (Ly / (By ny) + Lx / (Bx nx)). Throws ContractViolation if nx * ny != Np.
double comm_time_2d(const CostModelInput& in, int nx, int ny);

/// Aspect/bandwidth factor R = sqrt(Lx By / (Ly Bx)).
double aspect_factor(const CostModelInput& in);

/// Analytic minimiser nx = sqrt(Np) R, ny = sqrt(Np) / R.
RealGrid optimal_grid_real(const CostModelInput& in);

/// Factor pair of Np with the smallest comm_time_2d (first one on ties, nx ascending).
Grid optimal_grid_integer(const CostModelInput& in);

/// Communication time at the analytic optimum: 2 S sqrt(Lx Ly / (Bx By)) / sqrt(Np).
double comm_time_min(const CostModelInput& in);

/// 1D tiling, no overlap: beta N/Np {1 + (2 S Ly / (beta By)) Np/N}.
Prediction predict_1d(const CostModelInput& in);

/// 2D tiling at the optimal grid, no overlap: beta N/Np {1 + (4S/beta) (Bx By)^(-1/2) sqrt(Np/N)}.
Prediction predict_2d(const CostModelInput& in);

/// 2D tiling on an explicit (possibly real-valued) grid, no overlap:
/// beta N/Np + 2 S (Ly / (By ny) + Lx / (Bx nx)). Equals predict_2d at the optimal grid.
Prediction predict_2d_grid(const CostModelInput& in, double nx, double ny);

/// 1D tiling with the bulk overlapping the halo exchange:
/// beta N/Np {max(1 - 6 Ly Np/N, (2 S Ly / (beta By)) Np/N) + 6 Ly Np/N}.
Prediction predict_1d_overlap(const CostModelInput& in);

/// 2D tiling, nx = ny = sqrt(Np), square lattices only:
/// beta N/Np {max(1 - 12 sqrt(Np/N), (2S/(beta By)) sqrt(Np/N)) + (2S/(beta Bx)) sqrt(Np/N) + 12 sqrt(Np/N)}.
/// Throws UnsupportedCase when Lx != Ly.
Prediction predict_2d_overlap(const CostModelInput& in);

/// PRAM bound w (1 + (N - 1)/Np).
double brent_bound(double w_per_site, double N, double Np);

/// One factorisation of one processor count.
struct CurveRow {
  int Np = 0;
  int nx = 0;
  int ny = 0;
  std::string tiling;  // "1D" (one axis split), "2D" (both split) or "single"
  double T_total = 0;
  double T_C = 0;
  double scale_violation = 0;
  double np_times_T = 0;
};

/// Model predictions for every factor pair (nx, ny) of each Np. Bandwidths are looked up
/// per message size: S * Ly/ny bytes contiguous, S * Lx/nx bytes non-contiguous. A
/// direction that is not split (n = 1) needs no transfer.
std::vector<CurveRow> scaling_curve(const CostModelInput& in, const std::vector<int>& np_list,
                                    const BandwidthTable& table);

/// The four model curves (1D / 2D x overlap / none) with nx = ny = sqrt(Np) in 2D.
struct ModelCurvePoint {
  int Np = 0;
  std::string curve;  // "1d", "1d_overlap", "2d", "2d_overlap"
  double T_total = 0;
  double scale_violation = 0;
  double np_times_T = 0;
};

std::vector<ModelCurvePoint> model_curves(const CostModelInput& in, const std::vector<int>& np_list,
                                          const BandwidthTable& table);

/// Best 1D and best 2D factorisation at one Np; has_2d is false for primes and 1.
struct TilingComparison {
  int Np = 0;
  CurveRow best_1d;
  CurveRow best_2d;
  bool has_2d = false;
};

std::vector<TilingComparison> compare_tilings(const std::vector<CurveRow>& rows);

/// All factor pairs (nx, ny) with nx * ny = Np, nx ascending.
std::vector<Grid> factor_pairs(int Np);

}  // namespace tlbm
