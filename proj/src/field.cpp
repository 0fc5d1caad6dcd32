#include "tlbm/field.hpp"

#include <algorithm>
#include <new>
#include <string>

#include "tlbm/error.hpp"

namespace tlbm {

PopulationField::PopulationField(const LatticeGeometry& geom, BufferRole role) : geom_(geom), role_(role) {
  try {
    data_.assign(geom.size(), 0.0);
  } catch (const std::bad_alloc&) {
    throw AllocationError("cannot allocate " + std::to_string(geom.size()) + " populations");
  } catch (const std::length_error&) {
    throw AllocationError("population count " + std::to_string(geom.size()) + " exceeds vector limits");
  }
}

void PopulationField::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

FieldPair::FieldPair(PopulationField a, PopulationField b) : buffers_{std::move(a), std::move(b)} {
  buffers_[0].set_role(BufferRole::Prv);
  buffers_[1].set_role(BufferRole::Nxt);
}

void FieldPair::swap() noexcept {
  read_ = 1 - read_;
  buffers_[read_].set_role(BufferRole::Prv);
  buffers_[1 - read_].set_role(BufferRole::Nxt);
}

FieldPair allocate_field(const LatticeGeometry& geom) {
  return FieldPair(PopulationField(geom, BufferRole::Prv), PopulationField(geom, BufferRole::Nxt));
}

void swap_buffers(PopulationField& prv, PopulationField& nxt) noexcept {
  std::swap(prv, nxt);
  prv.set_role(BufferRole::Prv);
  nxt.set_role(BufferRole::Nxt);
}

PopulationField convert_layout(const PopulationField& src, Layout layout) {
  LatticeGeometry g = src.geometry();
  g.layout = layout;
  PopulationField dst(g, src.role());
  const LatticeGeometry& s = src.geometry();
  for (int l = 0; l < s.Q; ++l) {
    for (int x = 0; x < s.NX(); ++x) {
      for (int y = 0; y < s.NY(); ++y) dst.raw()[g.offset(l, x, y)] = src.raw()[s.offset(l, x, y)];
    }
  }
  return dst;
}

}  // namespace tlbm
