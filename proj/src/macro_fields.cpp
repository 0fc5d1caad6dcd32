#include "tlbm/macro_fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "tlbm/error.hpp"
#include "tlbm/kernels.hpp"

namespace tlbm {

MacroFields::MacroFields(int lx, int ly)
    : Lx(lx),
      Ly(ly),
      rho(static_cast<std::size_t>(lx) * ly),
      ux(rho.size()),
      uy(rho.size()),
      T(rho.size()) {}

MacroFields compute_macro_fields(const PopulationField& field, const VelocitySet& vs) {
  const LatticeGeometry& g = field.geometry();
  MacroFields m(g.Lx, g.Ly);
  std::vector<double> f(vs.Q);
  for (int y = 0; y < g.Ly; ++y) {
    for (int x = 0; x < g.Lx; ++x) {
      for (int l = 0; l < vs.Q; ++l) f[l] = field(l, x, y);
      SiteMoments s;
      try {
        s = moments(f, vs);
      } catch (const DomainError& e) {
        throw StepError(e.what(), x + g.origin_x, y + g.origin_y);
      }
      const std::size_t i = m.index(x, y);
      m.rho[i] = s.rho;
      m.ux[i] = s.ux;
      m.uy[i] = s.uy;
      m.T[i] = s.T;
    }
  }
  return m;
}

void write_macro_csv(const MacroFields& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "x,y,rho,ux,uy,T\n";
  out << std::setprecision(17);
  for (int y = 0; y < m.Ly; ++y) {
    for (int x = 0; x < m.Lx; ++x) {
      const std::size_t i = m.index(x, y);
      out << x << ',' << y << ',' << m.rho[i] << ',' << m.ux[i] << ',' << m.uy[i] << ',' << m.T[i] << '\n';
    }
  }
}

void write_temperature_pgm(const MacroFields& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "P5\n" << m.Lx << ' ' << m.Ly << "\n255\n";
  const auto [lo_it, hi_it] = std::minmax_element(m.T.begin(), m.T.end());
  const double lo = m.T.empty() ? 0.0 : *lo_it;
  const double span = m.T.empty() ? 0.0 : *hi_it - lo;
  std::vector<unsigned char> row(static_cast<std::size_t>(m.Lx));
  for (int y = m.Ly - 1; y >= 0; --y) {
    for (int x = 0; x < m.Lx; ++x) {
      const double v = span > 0 ? (m.T[m.index(x, y)] - lo) / span : 0.0;
      row[x] = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace tlbm
