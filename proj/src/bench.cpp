#include "tlbm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <thread>

#include "tlbm/comm.hpp"
#include "tlbm/decomposition.hpp"
#include "tlbm/error.hpp"
#include "tlbm/field.hpp"
#include "tlbm/initial_conditions.hpp"
#include "tlbm/kernels.hpp"
#include "tlbm/rank.hpp"

namespace tlbm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Distinct value per (population, global site) so a misplaced halo value is detected.
double tag_value(int l, int x, int y) { return l + 64.0 * x + 1048576.0 * y; }

void run_split(int workers, const Region& whole, const std::function<void(const Region&)>& kernel) {
  if (workers <= 1) {
    kernel(whole);
    return;
  }
  std::vector<std::jthread> pool;
  const int width = whole.x1 - whole.x0;
  for (int w = 0; w < workers; ++w) {
    Region r = whole;
    r.x0 = whole.x0 + width * w / workers;
    r.x1 = whole.x0 + width * (w + 1) / workers;
    if (r.x1 > r.x0) pool.emplace_back([&kernel, r] { kernel(r); });
  }
}

void fill_random(PopulationField& f, const VelocitySet& vs) {
  const InitFn init = random_near_equilibrium(vs, 12345, 0.01);
  const LatticeGeometry& g = f.geometry();
  std::vector<double> site(vs.Q);
  for (int x = -g.Hx; x < g.Lx + g.Hx; ++x) {
    for (int y = -g.Hy; y < g.Ly + g.Hy; ++y) {
      init(x, y, site);
      for (int l = 0; l < vs.Q; ++l) f(l, x, y) = site[l];
    }
  }
}

}  // namespace

BenchResult time_operation(const std::string& name, double parameter, double work, const std::string& unit,
                           const std::function<void()>& op, const BenchOptions& opt) {
  if (opt.repetitions < 5) throw ConfigError("benchmarks need at least 5 repetitions");
  int inner = opt.inner;
  if (inner <= 0) {
    const auto t0 = Clock::now();
    op();
    const double once = std::max(elapsed(t0), 1e-9);
    inner = std::clamp(static_cast<int>(std::ceil(opt.min_seconds / once)), 1, 1 << 20);
  }
  std::vector<double> samples;
  for (int rep = 0; rep < opt.warmups + opt.repetitions; ++rep) {
    const auto t0 = Clock::now();
    for (int i = 0; i < inner; ++i) op();
    const double per_call = elapsed(t0) / inner;
    if (rep >= opt.warmups) samples.push_back(per_call);
  }
  std::sort(samples.begin(), samples.end());
  BenchResult r;
  r.name = name;
  r.parameter = parameter;
  r.repetitions = static_cast<int>(samples.size());
  const std::size_t n = samples.size();
  r.median = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  r.min = samples.front();
  r.max = samples.back();
  r.work = work;
  r.metric = r.median > 0 ? work / r.median : 0.0;
  r.metric_unit = unit;
  return r;
}

BenchKernel parse_bench_kernel(const std::string& text) {
  if (text == "propagate") return BenchKernel::Propagate;
  if (text == "collide") return BenchKernel::Collide;
  throw ConfigError("unknown kernel '" + text + "' (expected propagate or collide)");
}

BenchResult bench_layout(int Lx, int Ly, BenchKernel kernel, Layout layout, int workers, const std::string& model,
                         const BenchOptions& opt) {
  if (workers < 1) throw ConfigError("workers must be at least 1");
  const VelocitySet vs = build_velocity_set(model);
  const PhysicsParams params{};
  const Collider collider(vs, params);
  const LatticeGeometry g_ref = make_geometry(Lx, Ly, vs.max_hop, vs.max_hop, vs, Layout::SoA);

  PopulationField ref_in(g_ref, BufferRole::Prv);
  fill_random(ref_in, vs);
  PopulationField ref_out = ref_in;
  PopulationField in = convert_layout(ref_in, layout);
  PopulationField out = in;

  auto apply = [&](const PopulationField& src, PopulationField& dst, int nworkers) {
    if (kernel == BenchKernel::Propagate) {
      run_split(nworkers, dst.geometry().physical(), [&](const Region& r) { propagate(src, dst, vs, r); });
    } else {
      run_split(nworkers, dst.geometry().physical(), [&](const Region& r) { collide_region(dst, collider, r); });
    }
  };

  apply(ref_in, ref_out, 1);
  apply(in, out, workers);
  for (int l = 0; l < vs.Q; ++l) {
    for (int x = 0; x < Lx; ++x) {
      for (int y = 0; y < Ly; ++y) {
        if (std::memcmp(&out(l, x, y), &ref_out(l, x, y), sizeof(double)) != 0) {
          throw RuntimeError("bench_layout: " + std::string(to_string(layout)) + " output differs from the reference at (" +
                             std::to_string(x) + ", " + std::to_string(y) + ")");
        }
      }
    }
  }

  // Collide relaxes in place; restarting from the same input keeps every repetition identical.
  const std::string name = std::string(kernel == BenchKernel::Propagate ? "propagate" : "collide") + "_" +
                           std::string(to_string(layout));
  return time_operation(
      name, workers, static_cast<double>(Lx) * Ly, "sites_per_s",
      [&] {
        if (kernel == BenchKernel::Collide) std::copy(in.data().begin(), in.data().end(), out.data().begin());
        apply(in, out, workers);
      },
      opt);
}

CopyMode parse_copy_mode(const std::string& text) {
  if (text == "mraw") return CopyMode::Mraw;
  if (text == "armw") return CopyMode::Armw;
  throw ConfigError("unknown copy mode '" + text + "' (expected mraw or armw)");
}

std::string to_string(CopyMode mode) { return mode == CopyMode::Mraw ? "mraw" : "armw"; }

BenchResult bench_misalignment(std::size_t bytes, std::size_t offset, CopyMode mode, const BenchOptions& opt) {
  if (offset >= bytes) throw ConfigError("offset must be smaller than the buffer");
  constexpr std::size_t kAlign = 64;
  const std::size_t words = bytes / sizeof(std::uint64_t);
  const std::size_t span = words * sizeof(std::uint64_t);
  auto src_store = std::make_unique<unsigned char[]>(span + offset + kAlign);
  auto dst_store = std::make_unique<unsigned char[]>(span + offset + kAlign);
  auto align = [](unsigned char* p) {
    const auto v = reinterpret_cast<std::uintptr_t>(p);
    return p + (kAlign - v % kAlign) % kAlign;
  };
  unsigned char* src = align(src_store.get());
  unsigned char* dst = align(dst_store.get());
  for (std::size_t i = 0; i < span + offset; ++i) src[i] = static_cast<unsigned char>(i * 131 + 7);

  unsigned char* read = mode == CopyMode::Mraw ? src + offset : src;
  unsigned char* write = mode == CopyMode::Armw ? dst + offset : dst;
  auto copy = [read, write, words] {
    for (std::size_t i = 0; i < words; ++i) {
      std::uint64_t v;
      std::memcpy(&v, read + i * sizeof v, sizeof v);
      std::memcpy(write + i * sizeof v, &v, sizeof v);
    }
  };
  copy();
  if (std::memcmp(read, write, span) != 0) throw RuntimeError("bench_misalignment: copy verification failed");
  return time_operation(to_string(mode), static_cast<double>(offset), 2.0 * span, "bytes_per_s", copy, opt);
}

std::vector<HaloBenchRow> bench_halo_exchange(const std::vector<int>& edges, const std::string& model,
                                              const BenchOptions& opt) {
  const VelocitySet vs = build_velocity_set(model);
  const PhysicsParams params{};
  const int h = vs.max_hop;
  const int thin = 4 * h;
  std::vector<HaloBenchRow> rows;

  auto make_ranks = [&](const std::vector<TileAssignment>& tiles, Communicator& comm) {
    std::vector<std::unique_ptr<Rank>> ranks;
    for (const TileAssignment& t : tiles) {
      ranks.push_back(std::make_unique<Rank>(t, vs, params, Layout::SoA, h, h, comm));
      PopulationField& f = ranks.back()->fields().prv();
      for (int l = 0; l < vs.Q; ++l) {
        for (int x = 0; x < t.lx; ++x) {
          for (int y = 0; y < t.ly; ++y) f(l, x, y) = tag_value(l, t.x0 + x, t.y0 + y);
        }
      }
    }
    return ranks;
  };
  auto mismatch = [](double got, double want, const char* what) {
    if (std::memcmp(&got, &want, sizeof got) != 0) {
      throw RuntimeError(std::string("bench_halo_exchange: wrong value in the ") + what + " halo");
    }
  };

  for (int edge : edges) {
    if (edge < 2 * h) throw ConfigError("halo bench edge must be at least " + std::to_string(2 * h));
    HaloBenchRow row;
    row.edge = edge;
    long long step = 0;

    {
      const int Lx = 2 * thin;
      Communicator comm(2);
      auto ranks = make_ranks(decompose(Lx, edge, 2, Tiling::one_d(2), false, h), comm);
      auto exchange = [&] {
        ++step;
        for (auto& r : ranks) r->send_x(step);
        for (auto& r : ranks) r->recv_x(step);
      };
      exchange();
      const FacePopulations into_left = x_face_populations(vs, +1);
      const FacePopulations into_right = x_face_populations(vs, -1);
      for (auto& r : ranks) {
        const TileAssignment& t = r->tile();
        const PopulationField& f = r->fields().prv();
        for (int d = 1; d <= h; ++d) {
          for (int y = 0; y < t.ly; ++y) {
            for (int l : into_left.by_depth[d - 1]) {
              mismatch(f(l, -d, y), tag_value(l, (t.x0 - d + Lx) % Lx, t.y0 + y), "left");
            }
            for (int l : into_right.by_depth[d - 1]) {
              mismatch(f(l, t.lx - 1 + d, y), tag_value(l, (t.x0 + t.lx - 1 + d) % Lx, t.y0 + y), "right");
            }
          }
        }
      }
      const HaloBuffers& b = ranks[0]->buffers();
      const double sent = 2.0 * (b.send_left.size() + b.send_right.size()) * sizeof(double);
      row.contiguous = time_operation("contiguous", edge, sent, "bytes_per_s", exchange, opt);
      row.contiguous.work = b.send_right.size() * sizeof(double);
      row.contiguous.metric = sent / row.contiguous.median;
    }

    {
      const int Ly = 2 * thin;
      Communicator comm(2);
      auto ranks = make_ranks(decompose(edge, Ly, 2, Tiling::two_d(1, 2), true, h), comm);
      auto exchange = [&] {
        ++step;
        for (auto& r : ranks) r->send_y(step);
        for (auto& r : ranks) r->recv_y(step);
      };
      exchange();
      const FacePopulations into_bottom = y_face_populations(vs, +1);
      const FacePopulations into_top = y_face_populations(vs, -1);
      for (auto& r : ranks) {
        const TileAssignment& t = r->tile();
        const PopulationField& f = r->fields().prv();
        for (int e = 1; e <= h; ++e) {
          for (int x = 0; x < t.lx; ++x) {
            for (int l : into_bottom.by_depth[e - 1]) {
              mismatch(f(l, x, -e), tag_value(l, t.x0 + x, (t.y0 - e + Ly) % Ly), "bottom");
            }
            for (int l : into_top.by_depth[e - 1]) {
              mismatch(f(l, x, t.ly - 1 + e), tag_value(l, t.x0 + x, (t.y0 + t.ly - 1 + e) % Ly), "top");
            }
          }
        }
      }
      const HaloBuffers& b = ranks[0]->buffers();
      const double sent = 2.0 * (b.send_bottom.size() + b.send_top.size()) * sizeof(double);
      row.noncontiguous = time_operation("noncontiguous", edge, sent, "bytes_per_s", exchange, opt);
      row.noncontiguous.work = b.send_top.size() * sizeof(double);
      row.noncontiguous.metric = sent / row.noncontiguous.median;
    }
    rows.push_back(row);
  }
  return rows;
}

BandwidthTable to_bandwidth_table(const std::vector<HaloBenchRow>& rows) {
  std::vector<BandwidthTable::Row> out;
  for (const HaloBenchRow& r : rows) {
    out.push_back({r.edge, r.contiguous.work, r.contiguous.metric, r.noncontiguous.work, r.noncontiguous.metric});
  }
  return BandwidthTable(std::move(out));
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchResult>& results) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  const std::string unit = results.empty() ? "metric" : results.front().metric_unit;
  out << "name,parameter,median_s,min_s,max_s," << unit << "\n" << std::setprecision(9);
  for (const BenchResult& r : results) {
    out << r.name << "," << r.parameter << "," << r.median << "," << r.min << "," << r.max << "," << r.metric << "\n";
  }
}

}  // namespace tlbm
