#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tlbm/geometry.hpp"

namespace tlbm {

enum class BufferRole { Prv, Nxt };

/// Q x NX x NY double-precision populations addressed as (l, x, y).
class PopulationField {
 public:
  PopulationField() = default;
  PopulationField(const LatticeGeometry& geom, BufferRole role);

  const LatticeGeometry& geometry() const noexcept { return geom_; }
  BufferRole role() const noexcept { return role_; }
  void set_role(BufferRole role) noexcept { role_ = role; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  double* raw() noexcept { return data_.data(); }
  const double* raw() const noexcept { return data_.data(); }

  /// Allocation coordinates, checked (throws ContractViolation).
  double& at(int l, int ax, int ay) { return data_[site_index(geom_, l, ax, ay)]; }
  double at(int l, int ax, int ay) const { return data_[site_index(geom_, l, ax, ay)]; }

  /// Physical coordinates (halo cells reachable through negative / overflowing indices), unchecked.
  double& operator()(int l, int x, int y) noexcept { return data_[geom_.phys_offset(l, x, y)]; }
  double operator()(int l, int x, int y) const noexcept { return data_[geom_.phys_offset(l, x, y)]; }

  void fill(double value);

 private:
  LatticeGeometry geom_{};
  BufferRole role_ = BufferRole::Prv;
  std::vector<double> data_;
};

/// Double buffer: kernels read prv() and write nxt(); swap() exchanges roles without copying.
class FieldPair {
 public:
  FieldPair() = default;
  FieldPair(PopulationField a, PopulationField b);

  PopulationField& prv() noexcept { return buffers_[read_]; }
  PopulationField& nxt() noexcept { return buffers_[1 - read_]; }
  const PopulationField& prv() const noexcept { return buffers_[read_]; }
  const PopulationField& nxt() const noexcept { return buffers_[1 - read_]; }

  void swap() noexcept;

 private:
  PopulationField buffers_[2];
  int read_ = 0;
};

/// Two zero-initialised buffers of identical shape.
FieldPair allocate_field(const LatticeGeometry& geom);

/// Swaps the roles of two buffers in place (pointer exchange only).
void swap_buffers(PopulationField& prv, PopulationField& nxt) noexcept;

/// Same values, other memory layout. Bit-exact.
PopulationField convert_layout(const PopulationField& src, Layout layout);

}  // namespace tlbm
