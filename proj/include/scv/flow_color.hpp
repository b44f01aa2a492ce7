#ifndef SCV_FLOW_COLOR_HPP
#define SCV_FLOW_COLOR_HPP

// Flow visualisation on an HSV colour wheel: hue encodes direction, saturation
// encodes magnitude relative to a maximum, value is always full. Zero flow is
// white, vectors at or beyond the maximum are fully saturated, and pixels
// masked invalid are black.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "scv/grid.hpp"

namespace scv {

struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb; ///< h*w*3, row-major

  const std::uint8_t *pixel(int row, int col) const { return rgb.data() + (static_cast<std::size_t>(row) * width + col) * 3; }
  friend bool operator==(const RgbImage &, const RgbImage &) = default;
};

namespace detail {

/// HSV (hue in degrees) to RGB in [0, 1].
inline void hsv_to_rgb(double hue, double sat, double out[3]) {
  for (int i = 0; i < 3; ++i) {
    // Channel offsets 5, 3, 1 sextants give the standard R, G, B ramps.
    const double k = std::fmod(static_cast<double>(5 - 2 * i) + hue / 60.0, 6.0);
    const double ramp = std::clamp(std::min(k, 4.0 - k), 0.0, 1.0);
    out[i] = 1.0 - sat * ramp;
  }
}

inline std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

} // namespace detail

/// Largest vector length over valid pixels.
inline double max_flow_magnitude(const FlowField &flow) {
  double m = 0.0;
  const auto d = flow.data();
  for (std::size_t i = 0; i < d.size(); ++i)
    if (flow.valid(i))
      m = std::max(m, std::hypot(static_cast<double>(d[i].u), static_cast<double>(d[i].v)));
  return m;
}

/// Renders `flow`; without `max_magnitude` the field's own maximum is used.
inline RgbImage flow_to_color(const FlowField &flow, std::optional<double> max_magnitude = std::nullopt) {
  const double max_mag = max_magnitude ? *max_magnitude : max_flow_magnitude(flow);
  RgbImage img{flow.height(), flow.width(), std::vector<std::uint8_t>(flow.size() * 3, 255)};
  const auto d = flow.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::uint8_t *px = img.rgb.data() + i * 3;
    if (!flow.valid(i)) {
      px[0] = px[1] = px[2] = 0;
      continue;
    }
    const double u = d[i].u;
    const double v = d[i].v;
    const double mag = std::hypot(u, v);
    if (mag == 0.0 || max_mag <= 0.0)
      continue;
    double hue = std::atan2(v, u) * 180.0 / std::numbers::pi;
    if (hue < 0.0)
      hue += 360.0;
    const double sat = std::min(mag / max_mag, 1.0);
    double rgb[3];
    detail::hsv_to_rgb(hue, sat, rgb);
    for (int c = 0; c < 3; ++c)
      px[c] = detail::to_byte(rgb[c]);
  }
  return img;
}

} // namespace scv

#endif // SCV_FLOW_COLOR_HPP
