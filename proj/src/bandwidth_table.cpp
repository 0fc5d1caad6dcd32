#include "tlbm/bandwidth_table.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>

#include "tlbm/error.hpp"

namespace tlbm {

namespace {

constexpr const char* kHeader =
    "edge,bytes_contiguous,bw_contiguous_Bps,bytes_noncontiguous,bw_noncontiguous_Bps";

double interpolate(std::vector<std::pair<double, double>> pts, double x) {
  if (pts.empty()) throw ConfigError("bandwidth table is empty");
  std::sort(pts.begin(), pts.end());
  if (x <= pts.front().first) return pts.front().second;
  if (x >= pts.back().first) return pts.back().second;
  auto hi = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const auto& p) { return v < p.first; });
  auto lo = hi - 1;
  const double span = hi->first - lo->first;
  if (span <= 0) return lo->second;
  const double t = (x - lo->first) / span;
  return lo->second + t * (hi->second - lo->second);
}

}  // namespace

BandwidthTable::BandwidthTable(std::vector<Row> rows) : rows_(std::move(rows)) {
  for (const Row& r : rows_) {
    if (!(r.bw_contiguous > 0) || !(r.bw_noncontiguous > 0) || r.bytes_contiguous < 0 ||
        r.bytes_noncontiguous < 0) {
      throw ConfigError("bandwidth table rows need positive bandwidths and non-negative sizes");
    }
  }
}

BandwidthTable BandwidthTable::constant(double contiguous, double noncontiguous) {
  return BandwidthTable({Row{0, 1.0, contiguous, 1.0, noncontiguous}});
}

double BandwidthTable::contiguous(double bytes) const {
  std::vector<std::pair<double, double>> pts;
  for (const Row& r : rows_) pts.emplace_back(r.bytes_contiguous, r.bw_contiguous);
  return interpolate(std::move(pts), bytes);
}

double BandwidthTable::noncontiguous(double bytes) const {
  std::vector<std::pair<double, double>> pts;
  for (const Row& r : rows_) pts.emplace_back(r.bytes_noncontiguous, r.bw_noncontiguous);
  return interpolate(std::move(pts), bytes);
}

void BandwidthTable::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << kHeader << '\n' << std::setprecision(17);
  for (const Row& r : rows_) {
    out << r.edge << ',' << r.bytes_contiguous << ',' << r.bw_contiguous << ',' << r.bytes_noncontiguous << ','
        << r.bw_noncontiguous << '\n';
  }
}

BandwidthTable BandwidthTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read bandwidth table " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("edge,", 0) != 0) {
    throw ConfigError(path.string() + ": missing header '" + kHeader + "'");
  }
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Row r;
    if (!(ss >> r.edge >> r.bytes_contiguous >> r.bw_contiguous >> r.bytes_noncontiguous >> r.bw_noncontiguous)) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw ConfigError(path.string() + ": no rows");
  return BandwidthTable(std::move(rows));
}

}  // namespace tlbm
