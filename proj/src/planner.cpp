#include "tlbm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tlbm/error.hpp"

namespace tlbm {

namespace {

Prediction finish(const CostModelInput& in, double T, double T_C, double nx, double ny) {
  Prediction p;
  p.T_total = T;
  p.T_C = T_C;
  p.T_P = in.beta * in.N / in.Np;
  p.nx = nx;
  p.ny = ny;
  p.scale_violation = T * in.Np / (in.beta * in.N);
  return p;
}

}  // namespace

CostModelInput CostModelInput::make(double Lx, double Ly, int Np, double Bx, double By, double beta, double S) {
  CostModelInput in;
  in.Lx = Lx;
  in.Ly = Ly;
  in.N = Lx * Ly;
  in.Np = Np;
  in.Bx = Bx;
  in.By = By;
  in.beta = beta;
  in.S = S;
  return in;
}

void CostModelInput::validate() const {
  if (!(Lx > 0) || !(Ly > 0) || !(N > 0) || Np < 1 || !(Bx > 0) || !(By > 0) || !(beta > 0) || !(S >= 0)) {
    throw ConfigError("cost model inputs must be strictly positive");
  }
  if (std::fabs(N - Lx * Ly) > 1e-9 * N) throw ConfigError("cost model input needs N = Lx * Ly");
}

double surface_over_volume(int Np, int d) {
  if ((d != 1 && d != 2) || Np < 1) throw ContractViolation("surface_over_volume needs d in {1, 2} and Np >= 1");
  return d * std::pow(static_cast<double>(Np), 1.0 / d);
}

double comm_time_2d(const CostModelInput& in, int nx, int ny) {
  if (nx < 1 || ny < 1 || static_cast<long long>(nx) * ny != in.Np) {
    throw ContractViolation("comm_time_2d: nx * ny must equal Np");
  }
  return in.S * (in.Ly / (in.By * ny) + in.Lx / (in.Bx * nx));
}

double aspect_factor(const CostModelInput& in) { return std::sqrt(in.Lx * in.By / (in.Ly * in.Bx)); }

RealGrid optimal_grid_real(const CostModelInput& in) {
  const double r = aspect_factor(in);
  const double s = std::sqrt(static_cast<double>(in.Np));
  return {s * r, s / r};
}

Grid optimal_grid_integer(const CostModelInput& in) {
  Grid best{};
  double best_t = 0;
  for (const Grid& g : factor_pairs(in.Np)) {
    const double t = comm_time_2d(in, g.nx, g.ny);
    if (best.nx == 0 || t < best_t) {
      best = g;
      best_t = t;
    }
  }
  return best;
}

double comm_time_min(const CostModelInput& in) {
  return in.S * 2.0 / std::sqrt(static_cast<double>(in.Np)) * std::sqrt(in.Lx * in.Ly / (in.Bx * in.By));
}

Prediction predict_1d(const CostModelInput& in) {
  const double ratio = in.Np / in.N;
  const double T = in.beta * in.N / in.Np * (1.0 + 2.0 * in.S * in.Ly / (in.beta * in.By) * ratio);
  return finish(in, T, 2.0 * in.S * in.Ly / in.By, in.Np, 1);
}

Prediction predict_2d(const CostModelInput& in) {
  const double root = std::sqrt(in.Np / in.N);
  const double T = in.beta * in.N / in.Np * (1.0 + 4.0 * in.S / in.beta / std::sqrt(in.Bx * in.By) * root);
  const RealGrid g = optimal_grid_real(in);
  return finish(in, T, 2.0 * comm_time_min(in), g.nx, g.ny);
}

Prediction predict_2d_grid(const CostModelInput& in, double nx, double ny) {
  const double tc = 2.0 * in.S * (in.Ly / (in.By * ny) + in.Lx / (in.Bx * nx));
  return finish(in, in.beta * in.N / in.Np + tc, tc, nx, ny);
}

Prediction predict_1d_overlap(const CostModelInput& in) {
  const double ratio = in.Np / in.N;
  const double border = 6.0 * in.Ly * ratio;
  const double comm = 2.0 * in.S * in.Ly / (in.beta * in.By) * ratio;
  const double T = in.beta * in.N / in.Np * (std::max(1.0 - border, comm) + border);
  return finish(in, T, 2.0 * in.S * in.Ly / in.By, in.Np, 1);
}

Prediction predict_2d_overlap(const CostModelInput& in) {
  if (in.Lx != in.Ly) {
    throw UnsupportedCase("overlapped 2D prediction is only defined for square lattices (Lx = Ly)");
  }
  const double root = std::sqrt(in.Np / in.N);
  const double border = 12.0 * root;
  const double comm_y = 2.0 * in.S / (in.beta * in.By) * root;
  const double comm_x = 2.0 * in.S / (in.beta * in.Bx) * root;
  const double T = in.beta * in.N / in.Np * (std::max(1.0 - border, comm_y) + comm_x + border);
  const double s = std::sqrt(static_cast<double>(in.Np));
  return finish(in, T, in.beta * in.N / in.Np * (comm_x + comm_y), s, s);
}

double brent_bound(double w_per_site, double N, double Np) { return w_per_site * (1.0 + (N - 1.0) / Np); }

std::vector<Grid> factor_pairs(int Np) {
  std::vector<Grid> out;
  for (int nx = 1; nx <= Np; ++nx) {
    if (Np % nx == 0) out.push_back({nx, Np / nx});
  }
  return out;
}

std::vector<CurveRow> scaling_curve(const CostModelInput& in, const std::vector<int>& np_list,
                                    const BandwidthTable& table) {
  std::vector<CurveRow> rows;
  for (int np : np_list) {
    if (np < 1) throw ConfigError("processor counts must be positive");
    for (const Grid& g : factor_pairs(np)) {
      CurveRow r;
      r.Np = np;
      r.nx = g.nx;
      r.ny = g.ny;
      r.tiling = (g.nx > 1 && g.ny > 1) ? "2D" : (np == 1 ? "single" : "1D");
      double tc = 0;
      if (g.nx > 1) {
        const double bytes = in.S * in.Ly / g.ny;
        tc += 2.0 * bytes / table.contiguous(bytes);
      }
      if (g.ny > 1) {
        const double bytes = in.S * in.Lx / g.nx;
        tc += 2.0 * bytes / table.noncontiguous(bytes);
      }
      r.T_C = tc;
      r.T_total = in.beta * in.N / np + tc;
      r.np_times_T = np * r.T_total;
      r.scale_violation = r.np_times_T / (in.beta * in.N);
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<ModelCurvePoint> model_curves(const CostModelInput& in, const std::vector<int>& np_list,
                                          const BandwidthTable& table) {
  std::vector<ModelCurvePoint> out;
  auto push = [&](int np, const char* name, const Prediction& p) {
    out.push_back({np, name, p.T_total, p.scale_violation, np * p.T_total});
  };
  for (int np : np_list) {
    CostModelInput c = in;
    c.Np = np;
    c.By = table.contiguous(in.S * in.Ly);
    c.Bx = table.noncontiguous(in.S * in.Lx);
    push(np, "1d", predict_1d(c));
    push(np, "1d_overlap", predict_1d_overlap(c));
    const double side = std::sqrt(static_cast<double>(np));
    c.By = table.contiguous(in.S * in.Ly / side);
    c.Bx = table.noncontiguous(in.S * in.Lx / side);
    push(np, "2d", predict_2d_grid(c, side, side));
    if (in.Lx == in.Ly) push(np, "2d_overlap", predict_2d_overlap(c));
  }
  return out;
}

std::vector<TilingComparison> compare_tilings(const std::vector<CurveRow>& rows) {
  std::map<int, TilingComparison> by_np;
  for (const CurveRow& r : rows) {
    TilingComparison& c = by_np[r.Np];
    c.Np = r.Np;
    if (r.tiling == "2D") {
      if (!c.has_2d || r.T_total < c.best_2d.T_total) c.best_2d = r;
      c.has_2d = true;
    } else if (c.best_1d.Np == 0 || r.T_total < c.best_1d.T_total) {
      c.best_1d = r;
    }
  }
  std::vector<TilingComparison> out;
  for (auto& [np, c] : by_np) out.push_back(c);
  return out;
}

}  // namespace tlbm
