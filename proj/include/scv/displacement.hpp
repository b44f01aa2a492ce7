#ifndef SCV_DISPLACEMENT_HPP
#define SCV_DISPLACEMENT_HPP

#include <cmath>
#include <vector>

#include "scv/corr_volume.hpp"
#include "scv/grid.hpp"

namespace scv {

/// Moves every entry of pixel x from d to d - delta(x). Correlation values are
/// copied, never recomputed.
inline SparseCorrelationVolume shift_volume(const SparseCorrelationVolume &scv, const FlowField &delta) {
  if (delta.height() != scv.height() || delta.width() != scv.width())
    throw InvalidArgument("shift_volume: residual flow dims differ from the volume");
  std::vector<SparseEntry> entries(scv.entries().begin(), scv.entries().end());
  const auto residual = delta.data();
  const std::size_t k = static_cast<std::size_t>(scv.k());
  for (std::size_t p = 0; p < scv.pixel_count(); ++p) {
    const FlowVec r = residual[p];
    if (!std::isfinite(r.u) || !std::isfinite(r.v))
      throw InvalidArgument("shift_volume: residual flow must be finite");
    for (std::size_t j = 0; j < k; ++j) {
      SparseEntry &e = entries[p * k + j];
      e.dx -= r.u;
      e.dy -= r.v;
    }
  }
  return SparseCorrelationVolume(scv.height(), scv.width(), scv.k(), scv.divisor(), std::move(entries));
}

/// f + delta, pixelwise. The mask of `flow` is kept.
inline FlowField accumulate_flow(const FlowField &flow, const FlowField &delta) {
  if (!flow.same_shape(delta))
    throw InvalidArgument("accumulate_flow: dims differ");
  FlowField out = flow;
  auto dst = out.data();
  const auto src = delta.data();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = dst[i] + src[i];
  return out;
}

} // namespace scv

#endif // SCV_DISPLACEMENT_HPP
