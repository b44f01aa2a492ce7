#ifndef SCV_GRID_HPP
#define SCV_GRID_HPP

// Grid containers shared by the whole pipeline.
//
// Coordinate convention (repo-wide): x is the column index and grows to the
// right, y is the row index and grows downward. Flow vectors (u, v) follow the
// same axes and are measured in pixels of the grid they live on.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scv/error.hpp"

namespace scv {

struct Coord2 {
  float x = 0.0f;
  float y = 0.0f;

  friend bool operator==(const Coord2 &, const Coord2 &) = default;
};

/// Row-major 2D grid of values.
template <class T> class Grid {
public:
  Grid() = default;
  Grid(int height, int width, T fill = T{}) : height_(height), width_(width) {
    detail::require(height >= 0 && width >= 0, "grid dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
  }
  Grid(int height, int width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    detail::require(height >= 0 && width >= 0, "grid dimensions must be non-negative");
    detail::require(data_.size() == static_cast<std::size_t>(height) * static_cast<std::size_t>(width),
                    "grid data length does not match dimensions");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T &operator()(int row, int col) { return data_[index(row, col)]; }
  const T &operator()(int row, int col) const { return data_[index(row, col)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_shape(const Grid &o) const { return height_ == o.height_ && width_ == o.width_; }

  friend bool operator==(const Grid &, const Grid &) = default;

private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

using ScalarGrid = Grid<float>;

/// Dense h x w grid of c-dimensional descriptors, channel-interleaved.
class FeatureMap {
public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int channels)
      : FeatureMap(height, width, channels,
                   std::vector<float>(static_cast<std::size_t>(std::max(height, 0)) *
                                      static_cast<std::size_t>(std::max(width, 0)) *
                                      static_cast<std::size_t>(std::max(channels, 0)))) {}
  FeatureMap(int height, int width, int channels, std::vector<float> data)
      : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    detail::require(height >= 1 && width >= 1 && channels >= 1,
                    "feature map dimensions must be positive");
    detail::require(data_.size() == pixel_count() * static_cast<std::size_t>(channels),
                    "feature map data length must equal h*w*c");
    for (float v : data_)
      detail::require(std::isfinite(v), "feature map values must be finite");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::span<const float> descriptor(int row, int col) const {
    return descriptor(static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                      static_cast<std::size_t>(col));
  }
  std::span<const float> descriptor(std::size_t pixel) const {
    return std::span<const float>(data_).subspan(pixel * static_cast<std::size_t>(channels_),
                                                 static_cast<std::size_t>(channels_));
  }
  std::span<const float> data() const { return data_; }

  /// Copy with every value multiplied by `factor`.
  FeatureMap scaled(float factor) const {
    std::vector<float> out(data_);
    for (float &v : out)
      v *= factor;
    return FeatureMap(height_, width_, channels_, std::move(out));
  }

  friend bool operator==(const FeatureMap &, const FeatureMap &) = default;

private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

struct FlowVec {
  float u = 0.0f;
  float v = 0.0f;

  friend bool operator==(const FlowVec &, const FlowVec &) = default;
  friend FlowVec operator+(FlowVec a, FlowVec b) { return {a.u + b.u, a.v + b.v}; }
  friend FlowVec operator-(FlowVec a, FlowVec b) { return {a.u - b.u, a.v - b.v}; }
  friend FlowVec operator*(FlowVec a, float s) { return {a.u * s, a.v * s}; }
};

/// Dense displacement field with an optional validity mask (empty = all valid).
class FlowField : public Grid<FlowVec> {
public:
  FlowField() = default;
  FlowField(int height, int width, FlowVec fill = {}) : Grid<FlowVec>(height, width, fill) {}
  FlowField(int height, int width, std::vector<FlowVec> data)
      : Grid<FlowVec>(height, width, std::move(data)) {}

  bool has_mask() const { return !valid_.empty(); }
  bool valid(int row, int col) const {
    return valid_.empty() ||
           valid_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width()) +
                  static_cast<std::size_t>(col)] != 0;
  }
  bool valid(std::size_t pixel) const { return valid_.empty() || valid_[pixel] != 0; }
  std::span<const std::uint8_t> mask() const { return valid_; }

  void set_mask(std::vector<std::uint8_t> mask) {
    detail::require(mask.empty() || mask.size() == size(), "mask length must equal h*w");
    valid_ = std::move(mask);
  }
  void clear_mask() { valid_.clear(); }

  friend bool operator==(const FlowField &, const FlowField &) = default;

private:
  std::vector<std::uint8_t> valid_;
};

// ---------------------------------------------------------------------------
// Inner products

namespace detail {
inline std::atomic<std::uint64_t> inner_product_counter{0};
}

/// Number of feature inner products evaluated since the last reset.
inline std::uint64_t inner_product_count() {
  return detail::inner_product_counter.load(std::memory_order_relaxed);
}
inline void reset_inner_product_count() {
  detail::inner_product_counter.store(0, std::memory_order_relaxed);
}

namespace detail {
// Unnormalized dot product with double accumulation; does not touch the counter.
inline double dot_unchecked(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}
} // namespace detail

/// Plain inner product between two descriptors.
inline double dot_features(std::span<const float> f1, std::span<const float> f2) {
  detail::require(f1.size() == f2.size(), "descriptor channel counts differ");
  detail::inner_product_counter.fetch_add(1, std::memory_order_relaxed);
  return detail::dot_unchecked(f1, f2);
}

// ---------------------------------------------------------------------------
// Sampling

/// Bilinear interpolation at p = (x=col, y=row); positions outside the grid
/// are clamped to the edge.
template <class T> T bilinear_sample(const Grid<T> &grid, Coord2 p) {
  if (grid.empty())
    throw InvalidArgument("bilinear_sample on an empty grid");
  const double x = std::clamp(static_cast<double>(p.x), 0.0, static_cast<double>(grid.width() - 1));
  const double y = std::clamp(static_cast<double>(p.y), 0.0, static_cast<double>(grid.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, grid.width() - 1);
  const int y1 = std::min(y0 + 1, grid.height() - 1);
  const float ax = static_cast<float>(x - x0);
  const float ay = static_cast<float>(y - y0);
  if (ax == 0.0f && ay == 0.0f)
    return grid(y0, x0);
  const T top = grid(y0, x0) * (1.0f - ax) + grid(y0, x1) * ax;
  const T bottom = grid(y1, x0) * (1.0f - ax) + grid(y1, x1) * ax;
  return top * (1.0f - ay) + bottom * ay;
}

/// Maps a fine-grid index to the coarse grid under the pixel-center convention.
inline float upsample_source_coord(int fine_index, int factor) {
  return (static_cast<float>(fine_index) + 0.5f) / static_cast<float>(factor) - 0.5f;
}

/// Bilinear upsampling onto an explicit output grid; displacements are
/// multiplied by `factor` so they stay in pixels of the output grid. Output
/// dims may differ from factor*(h, w) when the source image was not a multiple
/// of the factor. A mask, if present, is upsampled by nearest neighbour.
inline FlowField upsample_flow_to(const FlowField &flow, int factor, int out_height, int out_width) {
  if (factor < 1)
    throw InvalidArgument("upsample factor must be >= 1");
  if (flow.empty())
    throw InvalidArgument("cannot upsample an empty flow field");
  detail::require(out_height >= 1 && out_width >= 1, "upsample output dims must be positive");
  FlowField out(out_height, out_width);
  const float s = static_cast<float>(factor);
  for (int row = 0; row < out_height; ++row) {
    const float sy = upsample_source_coord(row, factor);
    for (int col = 0; col < out_width; ++col) {
      const Coord2 p{upsample_source_coord(col, factor), sy};
      out(row, col) = bilinear_sample<FlowVec>(flow, p) * s;
    }
  }
  if (flow.has_mask()) {
    std::vector<std::uint8_t> mask(out.size());
    for (int row = 0; row < out_height; ++row)
      for (int col = 0; col < out_width; ++col)
        mask[static_cast<std::size_t>(row) * out_width + col] =
            flow.valid(std::min(row / factor, flow.height() - 1), std::min(col / factor, flow.width() - 1)) ? 1 : 0;
    out.set_mask(std::move(mask));
  }
  return out;
}

/// Upsampling to factor*(h, w).
inline FlowField upsample_flow(const FlowField &flow, int factor) {
  if (factor < 1)
    throw InvalidArgument("upsample factor must be >= 1");
  if (factor == 1)
    return flow;
  return upsample_flow_to(flow, factor, flow.height() * factor, flow.width() * factor);
}

} // namespace scv

#endif // SCV_GRID_HPP
