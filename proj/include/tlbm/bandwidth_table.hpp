#pragma once

#include <filesystem>
#include <vector>

namespace tlbm {

/// Effective halo-exchange bandwidth as a function of message size, for
/// contiguous (left/right faces) and non-contiguous (top/bottom faces) traffic.
class BandwidthTable {
 public:
  struct Row {
    int edge = 0;                     // tile edge length the row was measured at
    double bytes_contiguous = 0;      // message size, bytes
    double bw_contiguous = 0;         // bytes/s
    double bytes_noncontiguous = 0;   // message size, bytes
    double bw_noncontiguous = 0;      // bytes/s
  };

  BandwidthTable() = default;
  explicit BandwidthTable(std::vector<Row> rows);

  /// Size-independent bandwidths.
  static BandwidthTable constant(double contiguous, double noncontiguous);

  /// Piecewise-linear in message size, clamped to the end points.
  double contiguous(double bytes) const;
  double noncontiguous(double bytes) const;

  const std::vector<Row>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }

  void save_csv(const std::filesystem::path& path) const;
  static BandwidthTable load_csv(const std::filesystem::path& path);

 private:
  std::vector<Row> rows_;
};

}  // namespace tlbm
