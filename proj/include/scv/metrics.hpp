#ifndef SCV_METRICS_HPP
#define SCV_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <span>

#include "scv/grid.hpp"

namespace scv {

namespace detail {

inline void check_same_dims(const FlowField &f, const FlowField &gt) {
  if (!f.same_shape(gt))
    throw InvalidArgument("flow dimensions do not match ground truth");
}

inline double endpoint_distance(FlowVec a, FlowVec b) {
  const double du = static_cast<double>(a.u) - static_cast<double>(b.u);
  const double dv = static_cast<double>(a.v) - static_cast<double>(b.v);
  return std::sqrt(du * du + dv * dv);
}

} // namespace detail

/// Average endpoint error over the ground truth's valid pixels.
inline double endpoint_error(const FlowField &flow, const FlowField &gt) {
  detail::check_same_dims(flow, gt);
  double sum = 0.0;
  std::size_t n = 0;
  const auto f = flow.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!gt.valid(i))
      continue;
    sum += detail::endpoint_distance(f[i], g[i]);
    ++n;
  }
  if (n == 0)
    throw InvalidArgument("no valid pixels to evaluate");
  return sum / static_cast<double>(n);
}

/// Percentage of valid pixels whose endpoint error exceeds both 3 px and 5% of
/// the ground-truth magnitude (KITTI outlier rule).
inline double f1_all(const FlowField &flow, const FlowField &gt) {
  detail::check_same_dims(flow, gt);
  std::size_t outliers = 0;
  std::size_t n = 0;
  const auto f = flow.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!gt.valid(i))
      continue;
    const double err = detail::endpoint_distance(f[i], g[i]);
    const double mag = detail::endpoint_distance(g[i], FlowVec{});
    if (err > 3.0 && err > 0.05 * mag)
      ++outliers;
    ++n;
  }
  if (n == 0)
    throw InvalidArgument("no valid pixels to evaluate");
  return 100.0 * static_cast<double>(outliers) / static_cast<double>(n);
}

/// Mean over valid pixels of |du| + |dv|.
inline double mean_l1(const FlowField &flow, const FlowField &gt) {
  detail::check_same_dims(flow, gt);
  double sum = 0.0;
  std::size_t n = 0;
  const auto f = flow.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!gt.valid(i))
      continue;
    sum += std::abs(static_cast<double>(f[i].u) - g[i].u) + std::abs(static_cast<double>(f[i].v) - g[i].v);
    ++n;
  }
  if (n == 0)
    throw InvalidArgument("no valid pixels to evaluate");
  return sum / static_cast<double>(n);
}

/// Exponentially weighted sum of per-iteration L1 errors; the last iterate
/// gets weight 1 and earlier ones decay by gamma per step.
inline double sequence_loss(std::span<const FlowField> flows, const FlowField &gt, double gamma = 0.8) {
  if (flows.empty())
    throw InvalidArgument("sequence_loss needs at least one flow");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw InvalidArgument("gamma must lie in (0, 1]");
  const std::size_t n = flows.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    loss += std::pow(gamma, static_cast<double>(n - 1 - i)) * mean_l1(flows[i], gt);
  return loss;
}

} // namespace scv

#endif // SCV_METRICS_HPP
