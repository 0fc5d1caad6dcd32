#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "tlbm/comm.hpp"
#include "tlbm/decomposition.hpp"
#include "tlbm/field.hpp"
#include "tlbm/kernels.hpp"

namespace tlbm {

enum class Schedule { Staged, Overlapped };

std::string_view to_string(Schedule s);
Schedule parse_schedule(std::string_view text);

/// Wall-clock seconds spent in each phase of one step on one rank.
struct PhaseTimes {
  double comm_nc = 0;
  double comm_c = 0;
  double bulk = 0;
  double border = 0;
  long long negative_populations = 0;
};

/// Populations that cross one face of a tile, grouped by halo depth.
///
/// For depth d = 1..max_hop, `by_depth[d-1]` lists the populations whose hop
/// component across the face is at least d; only those are read from the
/// halo layer at that depth by the pull stencil. For D2Q37 the lists have
/// 15 + 8 + 3 = 26 entries in total.
struct FacePopulations {
  std::vector<std::vector<int>> by_depth;
  int total() const noexcept;
};

/// hop_sign = +1: populations with c.x >= d (fill a left halo); -1: c.x <= -d.
FacePopulations x_face_populations(const VelocitySet& vs, int hop_sign);
/// hop_sign = +1: c.y >= d (fill a bottom halo); -1: c.y <= -d.
FacePopulations y_face_populations(const VelocitySet& vs, int hop_sign);

/// Persistent send/receive staging for the four faces of a tile, allocated once.
struct HaloBuffers {
  std::vector<double> send_left, send_right, send_bottom, send_top;
  std::vector<double> recv_left, recv_right, recv_bottom, recv_top;
};

/// One simulated rank: a tile with double-buffered populations and the
/// halo-exchange protocol towards its neighbours.
class Rank {
 public:
  Rank(const TileAssignment& tile, const VelocitySet& vs, const PhysicsParams& params, Layout layout, int Hx,
       int Hy, Communicator& comm);

  const TileAssignment& tile() const noexcept { return tile_; }
  FieldPair& fields() noexcept { return fields_; }
  const FieldPair& fields() const noexcept { return fields_; }
  const HaloBuffers& buffers() const noexcept { return buf_; }
  const Collider& collider() const noexcept { return collider_; }

  /// Y-direction halos of prv: exchange with the up/down neighbours (pack,
  /// transfer, unpack over physical columns only) and mirror-fill wall sides.
  void pbc_nc(long long step);

  /// X-direction halos of prv: exchange the edge columns, including the
  /// already-updated Y-halo rows so that corners receive diagonal data.
  void pbc_c(long long step);

  /// The two halves of pbc_nc / pbc_c: pack and post, then wait and unpack.
  void send_y(long long step);
  void recv_y(long long step);
  void send_x(long long step);
  void recv_x(long long step);

  /// One full time step; on return prv holds the new state.
  PhaseTimes step(long long step, Schedule schedule);

  /// Fills every halo cell of prv with quiet NaN.
  void poison_halos();

  /// Gathers the rows sent to the bottom (hop_sign -1: rows read by the down
  /// neighbour's top halo) or top neighbour into `out`; unpack is the inverse.
  void pack_y(const PopulationField& f, bool towards_up, std::span<double> out) const;
  void unpack_y(PopulationField& f, bool into_top, std::span<const double> in) const;
  void pack_x(const PopulationField& f, bool towards_right, std::span<double> out) const;
  void unpack_x(PopulationField& f, bool into_right, std::span<const double> in) const;

  /// Specular reflection of the first physical rows into a wall-side halo.
  void mirror_fill(PopulationField& f, bool top) const;

  /// Physical sub-regions used by the overlapped schedule.
  Region bulk_region() const noexcept;
  Region left_region() const noexcept;
  Region right_region() const noexcept;
  Region bottom_region() const noexcept;
  Region top_region() const noexcept;

 private:
  void check_size(const std::vector<double>& msg, std::size_t expected, HaloSide side) const;

  TileAssignment tile_;
  const VelocitySet* vs_;
  PhysicsParams params_;
  Collider collider_;
  Communicator* comm_;
  FieldPair fields_;
  int depth_;
  int row_lo_, row_hi_;  // rows carried by X-face messages
  FacePopulations x_pos_, x_neg_, y_pos_, y_neg_;
  HaloBuffers buf_;
};

}  // namespace tlbm
