#include "tlbm/runtime.hpp"

#include <unistd.h>

#include <chrono>
#include <exception>
#include <latch>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "tlbm/comm.hpp"
#include "tlbm/error.hpp"

namespace tlbm {

namespace {

using Clock = std::chrono::steady_clock;

double physical_memory_bytes() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0) return 0;
  return static_cast<double>(pages) * static_cast<double>(page);
}

void initialise_tile(Rank& rank, const InitFn& init, int Q) {
  PopulationField& f = rank.fields().prv();
  const TileAssignment& t = rank.tile();
  std::vector<double> site(Q);
  for (int x = 0; x < t.lx; ++x) {
    for (int y = 0; y < t.ly; ++y) {
      init(t.x0 + x, t.y0 + y, site);
      for (int l = 0; l < Q; ++l) f(l, x, y) = site[l];
    }
  }
}

std::vector<double> encode_snapshot(const TileAssignment& t, const MacroFields& m) {
  std::vector<double> msg;
  msg.reserve(4 + 4 * m.rho.size());
  msg.insert(msg.end(), {double(t.x0), double(t.y0), double(t.lx), double(t.ly)});
  for (const auto* v : {&m.rho, &m.ux, &m.uy, &m.T}) msg.insert(msg.end(), v->begin(), v->end());
  return msg;
}

void decode_snapshot(const std::vector<double>& msg, MacroFields& global) {
  const int x0 = static_cast<int>(msg[0]), y0 = static_cast<int>(msg[1]);
  const int lx = static_cast<int>(msg[2]), ly = static_cast<int>(msg[3]);
  const std::size_t n = static_cast<std::size_t>(lx) * ly;
  if (msg.size() != 4 + 4 * n) throw ProtocolError("snapshot message has the wrong size");
  std::vector<double>* dst[] = {&global.rho, &global.ux, &global.uy, &global.T};
  for (int k = 0; k < 4; ++k) {
    const double* src = msg.data() + 4 + k * n;
    for (int y = 0; y < ly; ++y) {
      for (int x = 0; x < lx; ++x) (*dst[k])[global.index(x0 + x, y0 + y)] = src[static_cast<std::size_t>(y) * lx + x];
    }
  }
}

}  // namespace

double mlups(long long sites, long long steps, double seconds) {
  if (steps <= 0 || seconds <= 0) return 0.0;
  return static_cast<double>(sites) * static_cast<double>(steps) / (seconds * 1e6);
}

double estimate_memory_bytes(const SimulationConfig& cfg, const VelocitySet& vs) {
  const int hx = cfg.Hx > 0 ? cfg.Hx : vs.max_hop;
  const int hy = cfg.Hy > 0 ? cfg.Hy : vs.max_hop;
  const int nx = cfg.tiling.kind == TilingKind::OneD ? cfg.ranks : cfg.tiling.nx;
  const int ny = cfg.tiling.kind == TilingKind::OneD ? 1 : cfg.tiling.ny;
  const double tile_sites = double(cfg.Lx / std::max(nx, 1) + 2 * hx) * double(cfg.Ly / std::max(ny, 1) + 2 * hy);
  double bytes = 2.0 * tile_sites * cfg.ranks * vs.Q * sizeof(double);
  if (cfg.gather_state) bytes += double(cfg.Lx + 2 * hx) * double(cfg.Ly + 2 * hy) * vs.Q * sizeof(double);
  return bytes;
}

MacroFields global_macro_fields(const PopulationField& state, const VelocitySet& vs) {
  return compute_macro_fields(state, vs);
}

RunResult run(const SimulationConfig& cfg) {
  const VelocitySet vs = build_velocity_set(cfg.model);
  cfg.physics.validate();
  if (!cfg.init) throw ConfigError("simulation needs an initial condition");
  if (cfg.steps < 0) throw ConfigError("step count must be non-negative");
  if (cfg.snapshot_every < 0) throw ConfigError("snapshot cadence must be non-negative");
  const int hx = cfg.Hx > 0 ? cfg.Hx : vs.max_hop;
  const int hy = cfg.Hy > 0 ? cfg.Hy : vs.max_hop;
  // Validates halo thickness against the stencil before any allocation.
  (void)make_geometry(cfg.Lx, cfg.Ly, hx, hy, vs);
  const auto tiles = decompose(cfg.Lx, cfg.Ly, cfg.ranks, cfg.tiling, cfg.periodic_y, vs.max_hop);

  const double needed = estimate_memory_bytes(cfg, vs);
  const double available = physical_memory_bytes();
  if (available > 0 && needed > 0.85 * available) {
    std::ostringstream s;
    s << "run needs about " << needed / 1e9 << " GB of populations, more than the " << available / 1e9
      << " GB of physical memory";
    throw AllocationError(s.str());
  }

  Communicator comm(cfg.ranks, cfg.heartbeat);
  std::vector<std::unique_ptr<Rank>> ranks;
  for (const TileAssignment& t : tiles) {
    ranks.push_back(std::make_unique<Rank>(t, vs, cfg.physics, cfg.layout, hx, hy, comm));
    initialise_tile(*ranks.back(), cfg.init, vs.Q);
  }

  std::vector<std::vector<StepMetrics>> per_rank(cfg.ranks);
  std::vector<std::string> errors(cfg.ranks);
  std::vector<bool> root_cause(cfg.ranks, false);
  std::latch start(cfg.ranks + 1);
  std::latch done(cfg.ranks);

  auto snapshot = [&](Rank& rank, long long step) {
    const MacroFields m = compute_macro_fields(rank.fields().prv(), vs);
    comm.send(rank.tile().rank, 0, {step, HaloSide::Snapshot}, encode_snapshot(rank.tile(), m));
    if (rank.tile().rank == 0) {
      MacroFields global(cfg.Lx, cfg.Ly);
      for (int r = 0; r < cfg.ranks; ++r) decode_snapshot(comm.recv(0, r, {step, HaloSide::Snapshot}), global);
      if (cfg.snapshot_sink) cfg.snapshot_sink(step, global);
    }
  };

  auto worker = [&](int r) {
    Rank& rank = *ranks[r];
    start.arrive_and_wait();
    try {
      per_rank[r].reserve(static_cast<std::size_t>(cfg.steps));
      if (cfg.snapshot_every > 0) snapshot(rank, 0);
      for (long long s = 0; s < cfg.steps; ++s) {
        if (cfg.poison_halos) rank.poison_halos();
        per_rank[r].push_back({s, r, rank.step(s, cfg.schedule)});
        if (cfg.snapshot_every > 0 && (s + 1) % cfg.snapshot_every == 0) snapshot(rank, s + 1);
      }
    } catch (const std::exception& e) {
      errors[r] = e.what();
      root_cause[r] = !comm.aborted();
      comm.abort("rank " + std::to_string(r) + " failed: " + e.what());
    }
    done.count_down();
  };

  std::vector<std::jthread> threads;
  threads.reserve(cfg.ranks);
  for (int r = 0; r < cfg.ranks; ++r) threads.emplace_back(worker, r);
  start.arrive_and_wait();
  const auto t0 = Clock::now();
  done.wait();
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
  threads.clear();

  std::ostringstream diag;
  bool failed = false;
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < cfg.ranks; ++r) {
      if (errors[r].empty() || root_cause[r] != (pass == 0)) continue;
      diag << (failed ? "; " : "") << "rank " << r << ": " << errors[r];
      failed = true;
    }
  }
  if (failed) throw RuntimeError(diag.str());

  RunResult result;
  result.steps = cfg.steps;
  result.sites = static_cast<long long>(cfg.Lx) * cfg.Ly;
  result.wall_seconds = cfg.steps > 0 ? wall : 0.0;
  result.mlups = mlups(result.sites, cfg.steps, result.wall_seconds);
  for (auto& m : per_rank) {
    for (const StepMetrics& s : m) result.negative_populations += s.times.negative_populations;
    result.metrics.insert(result.metrics.end(), m.begin(), m.end());
  }

  if (cfg.gather_state) {
    PopulationField global(make_geometry(cfg.Lx, cfg.Ly, hx, hy, vs, Layout::SoA), BufferRole::Prv);
    for (const auto& rank : ranks) {
      const TileAssignment& t = rank->tile();
      const PopulationField& f = rank->fields().prv();
      for (int l = 0; l < vs.Q; ++l) {
        for (int x = 0; x < t.lx; ++x) {
          for (int y = 0; y < t.ly; ++y) global(l, t.x0 + x, t.y0 + y) = f(l, x, y);
        }
      }
    }
    result.state = std::move(global);
  }
  return result;
}

}  // namespace tlbm
