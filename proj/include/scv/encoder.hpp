#ifndef SCV_ENCODER_HPP
#define SCV_ENCODER_HPP

// Multi-scale displacement encoder.
//
// The k entries of each pixel are turned into a fixed-size dense vector:
// for every pyramid level l the displacements are divided by 2^(l-1), entries
// with ||d||_inf > r are dropped, and the survivors are bilinearly splatted onto
// the (2r+1)^2 integer grid of displacements in [-r, r]^2. The per-level grids
// are concatenated, so a pixel carries L*(2r+1)^2 channels.
//
// Channel layout: level-major; inside a level, row-major over (dy, dx) starting
// at (-r, -r). Channel of cell (dx, dy) at level l (1-based):
//   (l-1)*(2r+1)^2 + (dy+r)*(2r+1) + (dx+r)

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scv/corr_volume.hpp"

namespace scv {

struct EncoderConfig {
  int levels = 5;
  int radius = 3;

  int window_size() const { return 2 * radius + 1; }
  int cells_per_level() const { return window_size() * window_size(); }
  int channels() const { return levels * cells_per_level(); }
  /// 2^(level-1) for 1-based level.
  int level_divisor(int level) const { return 1 << (level - 1); }

  void validate() const {
    detail::require(levels >= 1 && levels <= 30, "encoder levels must lie in [1, 30]");
    detail::require(radius >= 1, "encoder radius must be >= 1");
  }
};

/// h x w x L(2r+1)^2 dense encoding of a sparse volume.
class MotionTensor {
public:
  MotionTensor() = default;
  MotionTensor(int height, int width, EncoderConfig cfg)
      : MotionTensor(height, width, cfg,
                     std::vector<float>(static_cast<std::size_t>(height) * width * cfg.channels(), 0.0f)) {}
  MotionTensor(int height, int width, EncoderConfig cfg, std::vector<float> data)
      : height_(height), width_(width), cfg_(cfg), data_(std::move(data)) {
    cfg_.validate();
    detail::require(height >= 1 && width >= 1, "motion tensor dims must be positive");
    detail::require(data_.size() == static_cast<std::size_t>(height) * width * cfg_.channels(),
                    "motion tensor data length must equal h*w*L*(2r+1)^2");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return cfg_.channels(); }
  const EncoderConfig &config() const { return cfg_; }

  std::span<const float> pixel(std::size_t p) const {
    return std::span<const float>(data_).subspan(p * channels(), static_cast<std::size_t>(channels()));
  }
  std::span<float> pixel(std::size_t p) {
    return std::span<float>(data_).subspan(p * channels(), static_cast<std::size_t>(channels()));
  }
  /// The (2r+1)^2 cells of one level (1-based) at pixel p.
  std::span<const float> level(std::size_t p, int level) const {
    return pixel(p).subspan(static_cast<std::size_t>(level - 1) * cfg_.cells_per_level(),
                            static_cast<std::size_t>(cfg_.cells_per_level()));
  }
  float cell(int row, int col, int level, int dx, int dy) const {
    const std::size_t p = static_cast<std::size_t>(row) * width_ + col;
    return this->level(p, level)[static_cast<std::size_t>((dy + cfg_.radius) * cfg_.window_size() + dx + cfg_.radius)];
  }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const MotionTensor &a, const MotionTensor &b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.cfg_.levels == b.cfg_.levels &&
           a.cfg_.radius == b.cfg_.radius && a.data_ == b.data_;
  }

private:
  int height_ = 0;
  int width_ = 0;
  EncoderConfig cfg_;
  std::vector<float> data_;
};

/// d / 2^(level-1). `levels` bounds the accepted level range.
inline Coord2 scale_to_level(Coord2 d, int level, int levels = EncoderConfig{}.levels) {
  if (level < 1 || level > levels)
    throw InvalidArgument("scale_to_level: level out of range");
  const float s = static_cast<float>(1 << (level - 1));
  return {d.x / s, d.y / s};
}

struct LevelEntry {
  Coord2 d;
  float value = 0.0f;
};

inline bool in_window(Coord2 d, int radius) {
  const float r = static_cast<float>(radius);
  return std::abs(d.x) <= r && std::abs(d.y) <= r;
}

/// Scales the pixel's entries to `level` and keeps those with ||d||_inf <= r.
inline std::vector<LevelEntry> window_filter(std::span<const SparseEntry> entries, int level, int radius,
                                             int levels = EncoderConfig{}.levels) {
  std::vector<LevelEntry> kept;
  kept.reserve(entries.size());
  for (const auto &e : entries) {
    const Coord2 d = scale_to_level({e.dx, e.dy}, level, levels);
    if (in_window(d, radius))
      kept.push_back({d, e.value});
  }
  return kept;
}

/// Splats windowed entries onto `cells` ((2r+1)^2, row-major from (-r,-r)),
/// accumulating into the existing contents. Integer coordinates go to a single
/// cell. Returns the number of neighbour writes that fell outside the grid;
/// those are skipped, and for in-window input the count is always zero.
inline std::size_t bilinear_splat(std::span<const LevelEntry> entries, int radius, std::span<double> cells) {
  const int size = 2 * radius + 1;
  detail::require(cells.size() == static_cast<std::size_t>(size) * size, "splat grid must hold (2r+1)^2 cells");
  std::size_t out_of_grid = 0;
  auto put = [&](int cx, int cy, double w) {
    if (cx < -radius || cx > radius || cy < -radius || cy > radius) {
      ++out_of_grid;
      return;
    }
    cells[static_cast<std::size_t>((cy + radius) * size + (cx + radius))] += w;
  };
  for (const auto &e : entries) {
    const double x = e.d.x;
    const double y = e.d.y;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = static_cast<int>(std::ceil(x));
    const int y1 = static_cast<int>(std::ceil(y));
    const double v = e.value;
    // (1 - |d - [d]|) for floor/ceil neighbours; collapses to 1 when integer.
    const double wx0 = x1 == x0 ? 1.0 : 1.0 - (x - x0);
    const double wy0 = y1 == y0 ? 1.0 : 1.0 - (y - y0);
    const double wx1 = 1.0 - (x1 - x);
    const double wy1 = 1.0 - (y1 - y);
    put(x0, y0, wx0 * wy0 * v);
    if (x1 != x0)
      put(x1, y0, wx1 * wy0 * v);
    if (y1 != y0)
      put(x0, y1, wx0 * wy1 * v);
    if (x1 != x0 && y1 != y0)
      put(x1, y1, wx1 * wy1 * v);
  }
  return out_of_grid;
}

/// Float-grid convenience wrapper.
inline std::vector<float> bilinear_splat(std::span<const LevelEntry> entries, int radius) {
  std::vector<double> acc(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1), 0.0);
  bilinear_splat(entries, radius, acc);
  return std::vector<float>(acc.begin(), acc.end());
}

struct EncodeStats {
  std::size_t out_of_grid_writes = 0;
  std::size_t kept_entries = 0; ///< summed over pixels and levels
};

inline MotionTensor encode(const SparseCorrelationVolume &scv, const EncoderConfig &cfg = {},
                           EncodeStats *stats = nullptr) {
  cfg.validate();
  MotionTensor out(scv.height(), scv.width(), cfg);
  const std::size_t cells = static_cast<std::size_t>(cfg.cells_per_level());
  std::vector<double> acc(cells);
  EncodeStats local;
  for (std::size_t p = 0; p < scv.pixel_count(); ++p) {
    auto dst = out.pixel(p);
    const auto entries = scv.entries_at(p);
    for (int level = 1; level <= cfg.levels; ++level) {
      const auto kept = window_filter(entries, level, cfg.radius, cfg.levels);
      std::fill(acc.begin(), acc.end(), 0.0);
      local.out_of_grid_writes += bilinear_splat(kept, cfg.radius, acc);
      local.kept_entries += kept.size();
      auto lvl = dst.subspan(static_cast<std::size_t>(level - 1) * cells, cells);
      for (std::size_t c = 0; c < cells; ++c)
        lvl[c] = static_cast<float>(acc[c]);
    }
  }
  if (stats)
    *stats = local;
  return out;
}

} // namespace scv

#endif // SCV_ENCODER_HPP
