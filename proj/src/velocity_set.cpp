#include "tlbm/velocity_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "tlbm/error.hpp"

namespace tlbm {

namespace {

using Real = long double;
using Matrix = std::vector<std::vector<Real>>;

std::vector<Hop> shell_members(const std::array<int, 2>& rep) {
  std::set<std::pair<int, int>> unique;
  for (auto [a, b] : {std::pair{rep[0], rep[1]}, std::pair{rep[1], rep[0]}}) {
    for (int sa : {1, -1}) {
      for (int sb : {1, -1}) unique.insert({sa * a, sb * b});
    }
  }
  std::vector<Hop> out;
  for (auto [x, y] : unique) out.push_back({x, y});
  // Counter-clockwise starting from +x, so the labelling is stable.
  std::sort(out.begin(), out.end(), [](const Hop& l, const Hop& r) {
    auto angle = [](const Hop& h) {
      Real a = std::atan2(static_cast<Real>(h.y), static_cast<Real>(h.x));
      return a < 0 ? a + 2 * std::numbers::pi_v<Real> : a;
    };
    return angle(l) < angle(r);
  });
  return out;
}

Real ipow(Real base, int e) {
  Real r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

Real double_factorial(int n) {
  Real r = 1;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

Real determinant(Matrix m) {
  const std::size_t n = m.size();
  Real det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    if (m[pivot][col] == 0) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      Real f = m[r][col] / m[col][col];
      for (std::size_t k = col; k < n; ++k) m[r][k] -= f * m[col][k];
    }
  }
  return det;
}

// Householder least squares for an overdetermined, full-column-rank system.
std::vector<Real> least_squares(Matrix a, std::vector<Real> b, Real& residual) {
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  for (std::size_t k = 0; k < cols; ++k) {
    Real norm = 0;
    for (std::size_t i = k; i < rows; ++i) norm += a[i][k] * a[i][k];
    norm = std::sqrt(norm);
    if (norm == 0) throw ConfigError("moment system is rank deficient");
    Real alpha = a[k][k] > 0 ? -norm : norm;
    std::vector<Real> v(rows, 0);
    v[k] = a[k][k] - alpha;
    for (std::size_t i = k + 1; i < rows; ++i) v[i] = a[i][k];
    Real vnorm2 = 0;
    for (std::size_t i = k; i < rows; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0) continue;
    for (std::size_t j = k; j < cols; ++j) {
      Real dot = 0;
      for (std::size_t i = k; i < rows; ++i) dot += v[i] * a[i][j];
      for (std::size_t i = k; i < rows; ++i) a[i][j] -= 2 * dot / vnorm2 * v[i];
    }
    Real dot = 0;
    for (std::size_t i = k; i < rows; ++i) dot += v[i] * b[i];
    for (std::size_t i = k; i < rows; ++i) b[i] -= 2 * dot / vnorm2 * v[i];
  }
  std::vector<Real> x(cols, 0);
  for (std::size_t k = cols; k-- > 0;) {
    Real s = b[k];
    for (std::size_t j = k + 1; j < cols; ++j) s -= a[k][j] * x[j];
    x[k] = s / a[k][k];
  }
  residual = 0;
  for (std::size_t i = cols; i < rows; ++i) residual += b[i] * b[i];
  residual = std::sqrt(residual);
  return x;
}

Real poly_eval(const std::vector<Real>& coeff, Real t) {
  Real r = 0;
  for (std::size_t k = coeff.size(); k-- > 0;) r = r * t + coeff[k];
  return r;
}

}  // namespace

int VelocitySet::index_of(Hop h) const noexcept {
  for (int l = 0; l < Q; ++l) {
    if (c[l] == h) return l;
  }
  return -1;
}

double gaussian_moment(int p, int q, double var) {
  if (p % 2 != 0 || q % 2 != 0) return 0.0;
  return static_cast<double>(double_factorial(p - 1) * double_factorial(q - 1) *
                             ipow(static_cast<Real>(var), (p + q) / 2));
}

double lattice_moment(const VelocitySet& vs, int p, int q) {
  Real sum = 0;
  for (int l = 0; l < vs.Q; ++l) {
    sum += vs.w[l] * ipow(vs.c[l].x, p) * ipow(vs.c[l].y, q);
  }
  return static_cast<double>(sum);
}

ShellSolution derive_weights(const std::vector<std::array<int, 2>>& shells, int max_order) {
  std::vector<std::array<int, 2>> monomials;
  for (int total = 0; total <= max_order; total += 2) {
    for (int q = 0; 2 * q <= total; q += 2) {
      if ((total - q) % 2 == 0 && q <= total - q) monomials.push_back({total - q, q});
    }
  }
  const std::size_t n_shells = shells.size();
  if (monomials.size() != n_shells + 1) {
    throw ConfigError("moment system needs exactly one equation more than speed shells");
  }

  std::vector<std::vector<Hop>> members;
  for (const auto& s : shells) members.push_back(shell_members(s));

  Matrix a(monomials.size(), std::vector<Real>(n_shells, 0));
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    for (std::size_t j = 0; j < n_shells; ++j) {
      for (const Hop& h : members[j]) {
        a[i][j] += ipow(h.x, monomials[i][0]) * ipow(h.y, monomials[i][1]);
      }
    }
  }

  // Right-hand side is polynomial in cs2; the augmented determinant is
  // linear in that column, so its coefficients are determinants themselves.
  const int degree = max_order / 2;
  std::vector<Real> consistency(degree + 1, 0);
  for (int k = 0; k <= degree; ++k) {
    Matrix aug = a;
    for (std::size_t i = 0; i < monomials.size(); ++i) {
      int p = monomials[i][0], q = monomials[i][1];
      aug[i].push_back((p + q) / 2 == k ? double_factorial(p - 1) * double_factorial(q - 1) : 0);
    }
    consistency[k] = determinant(aug);
  }

  int hop2 = 0;
  for (const auto& s : shells) hop2 = std::max(hop2, s[0] * s[0] + s[1] * s[1]);
  const Real lo_bound = 1e-6L;
  const Real hi_bound = static_cast<Real>(hop2) + 1;
  const int samples = 20000;

  ShellSolution best;
  Real best_residual = std::numeric_limits<Real>::infinity();
  Real prev_t = lo_bound;
  Real prev_v = poly_eval(consistency, prev_t);
  for (int s = 1; s <= samples; ++s) {
    Real t = lo_bound + (hi_bound - lo_bound) * s / samples;
    Real v = poly_eval(consistency, t);
    if ((prev_v < 0) != (v < 0) || v == 0) {
      Real lo = prev_t, hi = t, flo = prev_v;
      for (int it = 0; it < 200 && hi - lo > 0; ++it) {
        Real mid = (lo + hi) / 2;
        if (mid == lo || mid == hi) break;
        Real fm = poly_eval(consistency, mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      Real root = (lo + hi) / 2;
      std::vector<Real> rhs(monomials.size());
      for (std::size_t i = 0; i < monomials.size(); ++i) {
        rhs[i] = static_cast<Real>(gaussian_moment(monomials[i][0], monomials[i][1], 1.0)) *
                 ipow(root, (monomials[i][0] + monomials[i][1]) / 2);
      }
      Real residual = 0;
      auto weights = least_squares(a, rhs, residual);
      bool positive = std::all_of(weights.begin(), weights.end(), [](Real x) { return x > 0; });
      if (positive && residual < best_residual) {
        best_residual = residual;
        best.cs2 = static_cast<double>(root);
        best.shell_weights.assign(weights.begin(), weights.end());
      }
    }
    prev_t = t;
    prev_v = v;
  }
  if (best.shell_weights.empty()) {
    throw ConfigError("no positive lattice temperature yields positive weights");
  }
  return best;
}

VelocitySet build_velocity_set(std::string_view name) {
  std::vector<std::array<int, 2>> shells;
  int order = 0;
  int eq_order = 0;
  if (name == "D2Q37") {
    shells = {{0, 0}, {1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}, {3, 0}, {3, 1}};
    order = 8;
    eq_order = 4;
  } else if (name == "D2Q9") {
    shells = {{0, 0}, {1, 0}, {1, 1}};
    order = 4;
    eq_order = 2;
  } else {
    throw ConfigError("unknown velocity set '" + std::string(name) + "' (expected D2Q37 or D2Q9)");
  }

  ShellSolution sol = derive_weights(shells, order);

  VelocitySet vs;
  vs.name = std::string(name);
  vs.cs2 = sol.cs2;
  vs.moment_order = order;
  vs.equilibrium_order = eq_order;
  for (std::size_t j = 0; j < shells.size(); ++j) {
    for (const Hop& h : shell_members(shells[j])) {
      vs.c.push_back(h);
      vs.w.push_back(sol.shell_weights[j]);
      vs.max_hop = std::max({vs.max_hop, std::abs(h.x), std::abs(h.y)});
    }
  }
  vs.Q = static_cast<int>(vs.c.size());
  vs.opposite.resize(vs.Q);
  vs.mirror_y.resize(vs.Q);
  for (int l = 0; l < vs.Q; ++l) {
    vs.opposite[l] = vs.index_of({-vs.c[l].x, -vs.c[l].y});
    vs.mirror_y[l] = vs.index_of({vs.c[l].x, -vs.c[l].y});
  }
  return vs;
}

}  // namespace tlbm
