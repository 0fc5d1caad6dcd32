#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tlbm/decomposition.hpp"
#include "tlbm/field.hpp"
#include "tlbm/initial_conditions.hpp"
#include "tlbm/kernels.hpp"
#include "tlbm/macro_fields.hpp"
#include "tlbm/rank.hpp"

namespace tlbm {

/// Called on rank 0 with the assembled macroscopic fields at each snapshot step.
using SnapshotSink = std::function<void(long long step, const MacroFields& fields)>;

struct SimulationConfig {
  int Lx = 128;
  int Ly = 128;
  std::string model = "D2Q37";
  int ranks = 1;
  Tiling tiling = Tiling::one_d(1);
  Schedule schedule = Schedule::Overlapped;
  long long steps = 100;
  PhysicsParams physics{};
  /// false: thermal walls at y = 0 and y = Ly - 1; true: periodic in Y, no bc.
  bool periodic_y = false;
  int Hx = 0;  // 0 selects the stencil reach
  int Hy = 0;
  Layout layout = Layout::SoA;
  /// Required; builds the initial populations per global site.
  InitFn init;
  long long snapshot_every = 0;
  SnapshotSink snapshot_sink;
  /// Fill every halo with NaN at the start of each step (debug runs, not timed runs).
  bool poison_halos = false;
  /// Gather the final global populations into RunResult::state.
  bool gather_state = true;
  std::chrono::milliseconds heartbeat{std::chrono::seconds(120)};
};

struct StepMetrics {
  long long step = 0;
  int rank = 0;
  PhaseTimes times;
};

struct RunResult {
  /// Global populations, SoA, halo thickness as configured (halo contents unspecified).
  std::optional<PopulationField> state;
  std::vector<StepMetrics> metrics;
  double wall_seconds = 0;
  double mlups = 0;
  long long negative_populations = 0;
  long long steps = 0;
  long long sites = 0;
};

/// MLUPS = sites * steps / (seconds * 1e6); 0 when nothing ran.
double mlups(long long sites, long long steps, double seconds);

/// Bytes the populations of a run occupy (both buffers of every tile plus the gathered state).
double estimate_memory_bytes(const SimulationConfig& cfg, const VelocitySet& vs);

/// Executes the configured number of steps on `ranks` concurrent workers.
/// Any rank failure aborts every rank; the collected diagnostics are rethrown as RuntimeError
/// (or the original ConfigError / StepError when a single rank failed for that reason).
RunResult run(const SimulationConfig& cfg);

/// Global macroscopic fields of a gathered state.
MacroFields global_macro_fields(const PopulationField& state, const VelocitySet& vs);

}  // namespace tlbm
