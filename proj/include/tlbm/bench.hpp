#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "tlbm/bandwidth_table.hpp"
#include "tlbm/geometry.hpp"

namespace tlbm {

struct BenchOptions {
  int repetitions = 5;
  int warmups = 3;
  /// Inner iterations per repetition; 0 picks enough to last ~min_seconds.
  int inner = 0;
  double min_seconds = 0.02;
};

struct BenchResult {
  std::string name;
  double parameter = 0;
  int repetitions = 0;
  double median = 0;  // seconds per operation
  double min = 0;
  double max = 0;
  double metric = 0;  // bytes/s or sites/s, from the median
  std::string metric_unit;
  double work = 0;    // bytes or sites per operation
};

/// Median/min/max seconds per call of `op`, after `warmups` discarded repetitions.
/// Each repetition runs `inner` calls (calibrated when 0).
BenchResult time_operation(const std::string& name, double parameter, double work, const std::string& unit,
                           const std::function<void()>& op, const BenchOptions& opt = {});

enum class BenchKernel { Propagate, Collide };
BenchKernel parse_bench_kernel(const std::string& text);

/// Times one kernel over the full Lx x Ly lattice with `workers` threads splitting X.
/// The output is first compared against a single-worker SoA reference.
BenchResult bench_layout(int Lx, int Ly, BenchKernel kernel, Layout layout, int workers,
                         const std::string& model = "D2Q37", const BenchOptions& opt = {});

enum class CopyMode { Mraw, Armw };
CopyMode parse_copy_mode(const std::string& text);
std::string to_string(CopyMode mode);

/// Streaming copy of `bytes` bytes with the read side (mraw) or write side (armw)
/// displaced by `offset` bytes, verified bytewise before timing. Metric: bytes read + written per second.
BenchResult bench_misalignment(std::size_t bytes, std::size_t offset, CopyMode mode, const BenchOptions& opt = {});

struct HaloBenchRow {
  int edge = 0;
  BenchResult contiguous;
  BenchResult noncontiguous;
};

/// Halo round trips between two ranks for each tile edge: X faces (contiguous) on a
/// 2 x 1 grid with edge-long columns, Y faces (non-contiguous) on a 1 x 2 grid with
/// edge-long rows. Received halos are checked against the sender before timing.
/// Metric: bytes sent by both ranks per second.
std::vector<HaloBenchRow> bench_halo_exchange(const std::vector<int>& edges, const std::string& model = "D2Q37",
                                              const BenchOptions& opt = {});

BandwidthTable to_bandwidth_table(const std::vector<HaloBenchRow>& rows);

/// parameter,median_s,min_s,max_s,<metric unit>
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchResult>& results);

}  // namespace tlbm
