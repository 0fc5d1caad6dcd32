#include "tlbm/rank.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <limits>
#include <string>

#include "tlbm/error.hpp"

namespace tlbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FacePopulations face_populations(const VelocitySet& vs, int hop_sign, bool along_x) {
  FacePopulations fp;
  for (int d = 1; d <= vs.max_hop; ++d) {
    std::vector<int> list;
    for (int l = 0; l < vs.Q; ++l) {
      const int hop = along_x ? vs.c[l].x : vs.c[l].y;
      if (hop * hop_sign >= d) list.push_back(l);
    }
    fp.by_depth.push_back(std::move(list));
  }
  return fp;
}

}  // namespace

std::string_view to_string(Schedule s) { return s == Schedule::Staged ? "staged" : "overlapped"; }

Schedule parse_schedule(std::string_view text) {
  if (text == "staged") return Schedule::Staged;
  if (text == "overlapped") return Schedule::Overlapped;
  throw ConfigError("unknown schedule '" + std::string(text) + "' (expected staged or overlapped)");
}

int FacePopulations::total() const noexcept {
  int n = 0;
  for (const auto& d : by_depth) n += static_cast<int>(d.size());
  return n;
}

FacePopulations x_face_populations(const VelocitySet& vs, int hop_sign) {
  return face_populations(vs, hop_sign, true);
}

FacePopulations y_face_populations(const VelocitySet& vs, int hop_sign) {
  return face_populations(vs, hop_sign, false);
}

Rank::Rank(const TileAssignment& tile, const VelocitySet& vs, const PhysicsParams& params, Layout layout, int Hx,
           int Hy, Communicator& comm)
    : tile_(tile),
      vs_(&vs),
      params_(params),
      collider_(vs, params),
      comm_(&comm),
      depth_(vs.max_hop),
      row_lo_(-vs.max_hop),
      row_hi_(tile.ly + vs.max_hop),
      x_pos_(x_face_populations(vs, +1)),
      x_neg_(x_face_populations(vs, -1)),
      y_pos_(y_face_populations(vs, +1)),
      y_neg_(y_face_populations(vs, -1)) {
  LatticeGeometry g = make_geometry(tile.lx, tile.ly, Hx, Hy, vs, layout, WallRows{tile.lowermost, tile.uppermost});
  g.origin_x = tile.x0;
  g.origin_y = tile.y0;
  fields_ = allocate_field(g);
  const std::size_t column = static_cast<std::size_t>(row_hi_ - row_lo_);
  const std::size_t row = static_cast<std::size_t>(tile.lx);
  buf_.send_left.resize(x_neg_.total() * column);
  buf_.recv_right.resize(x_neg_.total() * column);
  buf_.send_right.resize(x_pos_.total() * column);
  buf_.recv_left.resize(x_pos_.total() * column);
  buf_.send_bottom.resize(y_neg_.total() * row);
  buf_.recv_top.resize(y_neg_.total() * row);
  buf_.send_top.resize(y_pos_.total() * row);
  buf_.recv_bottom.resize(y_pos_.total() * row);
}

Region Rank::bulk_region() const noexcept { return {depth_, tile_.lx - depth_, depth_, tile_.ly - depth_}; }
Region Rank::left_region() const noexcept { return {0, depth_, depth_, tile_.ly - depth_}; }
Region Rank::right_region() const noexcept { return {tile_.lx - depth_, tile_.lx, depth_, tile_.ly - depth_}; }
Region Rank::bottom_region() const noexcept { return {0, tile_.lx, 0, depth_}; }
Region Rank::top_region() const noexcept { return {0, tile_.lx, tile_.ly - depth_, tile_.ly}; }

void Rank::pack_x(const PopulationField& f, bool towards_right, std::span<double> out) const {
  const FacePopulations& pops = towards_right ? x_pos_ : x_neg_;
  const LatticeGeometry& g = f.geometry();
  const std::ptrdiff_t sy = g.stride_y();
  const int n = row_hi_ - row_lo_;
  if (out.size() != static_cast<std::size_t>(pops.total() * n)) throw ProtocolError("pack_x: staging size mismatch");
  std::size_t k = 0;
  for (int d = 1; d <= depth_; ++d) {
    const int col = towards_right ? tile_.lx - d : d - 1;
    for (int l : pops.by_depth[d - 1]) {
      const double* src = f.raw() + g.phys_offset(l, col, row_lo_);
      if (sy == 1) {
        std::copy_n(src, n, out.data() + k);
      } else {
        for (int i = 0; i < n; ++i) out[k + i] = src[i * sy];
      }
      k += n;
    }
  }
}

void Rank::unpack_x(PopulationField& f, bool into_right, std::span<const double> in) const {
  const FacePopulations& pops = into_right ? x_neg_ : x_pos_;
  const LatticeGeometry& g = f.geometry();
  const std::ptrdiff_t sy = g.stride_y();
  const int n = row_hi_ - row_lo_;
  if (in.size() != static_cast<std::size_t>(pops.total() * n)) throw ProtocolError("unpack_x: staging size mismatch");
  std::size_t k = 0;
  for (int d = 1; d <= depth_; ++d) {
    const int col = into_right ? tile_.lx - 1 + d : -d;
    for (int l : pops.by_depth[d - 1]) {
      double* dst = f.raw() + g.phys_offset(l, col, row_lo_);
      if (sy == 1) {
        std::copy_n(in.data() + k, n, dst);
      } else {
        for (int i = 0; i < n; ++i) dst[i * sy] = in[k + i];
      }
      k += n;
    }
  }
}

void Rank::pack_y(const PopulationField& f, bool towards_up, std::span<double> out) const {
  const FacePopulations& pops = towards_up ? y_pos_ : y_neg_;
  const LatticeGeometry& g = f.geometry();
  const std::ptrdiff_t sx = g.stride_x();
  const int n = tile_.lx;
  if (out.size() != static_cast<std::size_t>(pops.total() * n)) throw ProtocolError("pack_y: staging size mismatch");
  std::size_t k = 0;
  for (int e = 1; e <= depth_; ++e) {
    const int row = towards_up ? tile_.ly - e : e - 1;
    for (int l : pops.by_depth[e - 1]) {
      const double* src = f.raw() + g.phys_offset(l, 0, row);
      for (int x = 0; x < n; ++x) out[k + x] = src[x * sx];
      k += n;
    }
  }
}

void Rank::unpack_y(PopulationField& f, bool into_top, std::span<const double> in) const {
  const FacePopulations& pops = into_top ? y_neg_ : y_pos_;
  const LatticeGeometry& g = f.geometry();
  const std::ptrdiff_t sx = g.stride_x();
  const int n = tile_.lx;
  if (in.size() != static_cast<std::size_t>(pops.total() * n)) throw ProtocolError("unpack_y: staging size mismatch");
  std::size_t k = 0;
  for (int e = 1; e <= depth_; ++e) {
    const int row = into_top ? tile_.ly - 1 + e : -e;
    for (int l : pops.by_depth[e - 1]) {
      double* dst = f.raw() + g.phys_offset(l, 0, row);
      for (int x = 0; x < n; ++x) dst[x * sx] = in[k + x];
      k += n;
    }
  }
}

void Rank::mirror_fill(PopulationField& f, bool top) const {
  const FacePopulations& pops = top ? y_neg_ : y_pos_;
  for (int e = 1; e <= depth_; ++e) {
    const int halo_row = top ? tile_.ly - 1 + e : -e;
    const int src_row = top ? tile_.ly - e : e - 1;
    for (int l : pops.by_depth[e - 1]) {
      const int m = vs_->mirror_y[l];
      for (int x = 0; x < tile_.lx; ++x) f(l, x, halo_row) = f(m, x, src_row);
    }
  }
}

void Rank::check_size(const std::vector<double>& msg, std::size_t expected, HaloSide side) const {
  if (msg.size() != expected) {
    throw ProtocolError("rank " + std::to_string(tile_.rank) + ": " + std::string(to_string(side)) +
                        " halo message has " + std::to_string(msg.size()) + " values, expected " +
                        std::to_string(expected));
  }
}

void Rank::send_y(long long step) {
  PopulationField& f = fields_.prv();
  const int me = tile_.rank;
  if (tile_.up >= 0) {
    pack_y(f, true, buf_.send_top);
    comm_->send(me, tile_.up, {step, HaloSide::Bottom}, buf_.send_top);
  }
  if (tile_.down >= 0) {
    pack_y(f, false, buf_.send_bottom);
    comm_->send(me, tile_.down, {step, HaloSide::Top}, buf_.send_bottom);
  }
  if (tile_.up < 0) mirror_fill(f, true);
  if (tile_.down < 0) mirror_fill(f, false);
}

void Rank::recv_y(long long step) {
  PopulationField& f = fields_.prv();
  const int me = tile_.rank;
  if (tile_.down >= 0) {
    std::vector<double> msg = comm_->recv(me, tile_.down, {step, HaloSide::Bottom});
    check_size(msg, buf_.recv_bottom.size(), HaloSide::Bottom);
    std::copy(msg.begin(), msg.end(), buf_.recv_bottom.begin());
    unpack_y(f, false, buf_.recv_bottom);
  }
  if (tile_.up >= 0) {
    std::vector<double> msg = comm_->recv(me, tile_.up, {step, HaloSide::Top});
    check_size(msg, buf_.recv_top.size(), HaloSide::Top);
    std::copy(msg.begin(), msg.end(), buf_.recv_top.begin());
    unpack_y(f, true, buf_.recv_top);
  }
}

void Rank::pbc_nc(long long step) {
  send_y(step);
  recv_y(step);
}

void Rank::send_x(long long step) {
  const PopulationField& f = fields_.prv();
  const int me = tile_.rank;
  pack_x(f, true, buf_.send_right);
  comm_->send(me, tile_.right, {step, HaloSide::Left}, buf_.send_right);
  pack_x(f, false, buf_.send_left);
  comm_->send(me, tile_.left, {step, HaloSide::Right}, buf_.send_left);
}

void Rank::recv_x(long long step) {
  PopulationField& f = fields_.prv();
  const int me = tile_.rank;
  std::vector<double> msg = comm_->recv(me, tile_.left, {step, HaloSide::Left});
  check_size(msg, buf_.recv_left.size(), HaloSide::Left);
  std::copy(msg.begin(), msg.end(), buf_.recv_left.begin());
  unpack_x(f, false, buf_.recv_left);
  msg = comm_->recv(me, tile_.right, {step, HaloSide::Right});
  check_size(msg, buf_.recv_right.size(), HaloSide::Right);
  std::copy(msg.begin(), msg.end(), buf_.recv_right.begin());
  unpack_x(f, true, buf_.recv_right);
}

void Rank::pbc_c(long long step) {
  send_x(step);
  recv_x(step);
}

void Rank::poison_halos() {
  PopulationField& f = fields_.prv();
  const LatticeGeometry& g = f.geometry();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int l = 0; l < g.Q; ++l) {
    for (int ax = 0; ax < g.NX(); ++ax) {
      const bool halo_col = ax < g.Hx || ax >= g.Hx + g.Lx;
      for (int ay = 0; ay < g.NY(); ++ay) {
        if (halo_col || ay < g.Hy || ay >= g.Hy + g.Ly) f.raw()[g.offset(l, ax, ay)] = nan;
      }
    }
  }
}

PhaseTimes Rank::step(long long step, Schedule schedule) {
  PhaseTimes t;
  PopulationField& prv = fields_.prv();
  PopulationField& nxt = fields_.nxt();
  const LatticeGeometry& g = prv.geometry();

  auto t0 = Clock::now();
  pbc_nc(step);
  t.comm_nc = seconds_since(t0);

  if (schedule == Schedule::Staged) {
    t0 = Clock::now();
    pbc_c(step);
    t.comm_c = seconds_since(t0);
    t0 = Clock::now();
    propagate(prv, nxt, *vs_, g.physical());
    bc(nxt, params_, *vs_);
    t.negative_populations += collide_region(nxt, collider_, g.physical()).negative_populations;
    t.bulk = seconds_since(t0);
  } else {
    t0 = Clock::now();
    send_x(step);
    auto bulk = std::async(std::launch::async, [&] {
      const auto b0 = Clock::now();
      KernelStats s = propagate_collide_fused(prv, nxt, collider_, bulk_region());
      return std::make_pair(s, seconds_since(b0));
    });
    try {
      recv_x(step);
    } catch (...) {
      bulk.wait();
      throw;
    }
    t.comm_c = seconds_since(t0);
    auto [stats, bulk_seconds] = bulk.get();
    t.bulk = bulk_seconds;
    t.negative_populations += stats.negative_populations;

    t0 = Clock::now();
    t.negative_populations += propagate_collide_fused(prv, nxt, collider_, left_region()).negative_populations;
    t.negative_populations += propagate_collide_fused(prv, nxt, collider_, right_region()).negative_populations;
    if (tile_.lowermost || tile_.uppermost) {
      if (tile_.lowermost) propagate(prv, nxt, *vs_, bottom_region());
      if (tile_.uppermost) propagate(prv, nxt, *vs_, top_region());
      bc(nxt, params_, *vs_);
    }
    const Region bottom = bottom_region();
    const Region top = top_region();
    t.negative_populations += tile_.lowermost ? collide_region(nxt, collider_, bottom).negative_populations
                                              : propagate_collide_fused(prv, nxt, collider_, bottom).negative_populations;
    t.negative_populations += tile_.uppermost ? collide_region(nxt, collider_, top).negative_populations
                                              : propagate_collide_fused(prv, nxt, collider_, top).negative_populations;
    t.border = seconds_since(t0);
  }
  fields_.swap();
  return t;
}

}  // namespace tlbm
