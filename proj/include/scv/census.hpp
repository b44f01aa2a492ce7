#ifndef SCV_CENSUS_HPP
#define SCV_CENSUS_HPP

#include <cstddef>
#include <vector>

#include "scv/grid.hpp"

namespace scv {

/// Channel count of a census descriptor with the given patch radius.
inline int census_channels(int patch_radius) { return (2 * patch_radius + 1) * (2 * patch_radius + 1) - 1; }

/// Non-learned descriptor: for each neighbour in the (2p+1)^2 patch (centre
/// excluded, row-major), sign(neighbour - centre) in {-1, 0, +1}. Neighbours
/// outside the image contribute 0.
inline FeatureMap census_features(const ScalarGrid &image, int patch_radius = 2) {
  detail::require(patch_radius >= 1, "census patch radius must be >= 1");
  detail::require(image.height() > 2 * patch_radius && image.width() > 2 * patch_radius,
                  "image too small for the census patch");
  const int h = image.height();
  const int w = image.width();
  const int c = census_channels(patch_radius);
  std::vector<float> data(static_cast<std::size_t>(h) * w * c, 0.0f);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float centre = image(y, x);
      float *out = data.data() + (static_cast<std::size_t>(y) * w + x) * c;
      int ch = 0;
      for (int dy = -patch_radius; dy <= patch_radius; ++dy) {
        for (int dx = -patch_radius; dx <= patch_radius; ++dx) {
          if (dx == 0 && dy == 0)
            continue;
          const int ny = y + dy;
          const int nx = x + dx;
          if (ny >= 0 && ny < h && nx >= 0 && nx < w) {
            const float diff = image(ny, nx) - centre;
            out[ch] = diff > 0.0f ? 1.0f : (diff < 0.0f ? -1.0f : 0.0f);
          }
          ++ch;
        }
      }
    }
  }
  return FeatureMap(h, w, c, std::move(data));
}

/// Box-filter downsampling by an integer factor (trailing rows/cols that do
/// not fill a whole block are dropped).
inline ScalarGrid box_downsample(const ScalarGrid &image, int factor) {
  detail::require(factor >= 1, "downsample factor must be >= 1");
  if (factor == 1)
    return image;
  const int h = image.height() / factor;
  const int w = image.width() / factor;
  detail::require(h >= 1 && w >= 1, "image too small for the downsample factor");
  ScalarGrid out(h, w);
  const float norm = 1.0f / static_cast<float>(factor * factor);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int j = 0; j < factor; ++j)
        for (int i = 0; i < factor; ++i)
          acc += image(y * factor + j, x * factor + i);
      out(y, x) = acc * norm;
    }
  return out;
}

} // namespace scv

#endif // SCV_CENSUS_HPP
