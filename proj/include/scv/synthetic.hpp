#ifndef SCV_SYNTHETIC_HPP
#define SCV_SYNTHETIC_HPP

// Deterministic synthetic inputs with known ground truth.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "scv/grid.hpp"

namespace scv::synthetic {

/// Uniform random texture in [0, 255), reproducible from `seed`.
inline ScalarGrid textured_image(int height, int width, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 255.0f);
  ScalarGrid img(height, width);
  for (float &v : img.data())
    v = dist(rng);
  return img;
}

/// Content moved by (tx, ty) with wrap-around: out(x) = in(x - t).
inline ScalarGrid translate_circular(const ScalarGrid &img, int tx, int ty) {
  const int h = img.height();
  const int w = img.width();
  ScalarGrid out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out(y, x) = img(((y - ty) % h + h) % h, ((x - tx) % w + w) % w);
  return out;
}

/// Constant flow (tx, ty); pixels closer than `margin` to the border or whose
/// match crosses the wrap seam are masked invalid.
inline FlowField translation_ground_truth(int height, int width, int tx, int ty, int margin) {
  FlowField gt(height, width, FlowVec{static_cast<float>(tx), static_cast<float>(ty)});
  std::vector<std::uint8_t> mask(gt.size(), 0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int x2 = x + tx;
      const int y2 = y + ty;
      const bool inside = std::min({x, y, x2, y2}) >= margin && std::max(x, x2) < width - margin &&
                          std::max(y, y2) < height - margin;
      mask[static_cast<std::size_t>(y) * width + x] = inside ? 1 : 0;
    }
  gt.set_mask(std::move(mask));
  return gt;
}

} // namespace scv::synthetic

#endif // SCV_SYNTHETIC_HPP
