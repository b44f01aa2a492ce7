#ifndef SCV_IO_FORMATS_HPP
#define SCV_IO_FORMATS_HPP

// On-disk formats. All multi-byte fields are little-endian.
//
//   .flo  Middlebury flow: f32 tag 202021.25 ("PIEH"), i32 width, i32 height,
//         then (u, v) f32 pairs, row-major.
//   SFM1  feature map: "SFM1", u32 h, w, c, f32 data (row-major, channels
//         interleaved).
//   SCV1  sparse correlation volume: "SCV1", u32 h, w, k, divisor, then per
//         pixel (row-major) k records of f32 dx, dy, value.
//   SMT1  motion tensor: "SMT1", u32 h, w, L, r, f32 data row-major with
//         L*(2r+1)^2 channels per pixel.
//   SKN1  top-k matches: "SKN1", u32 h, w, target_h, target_w, k, then per
//         pixel k records of u32 row-major target index, f32 score.
//
// Every parser validates the whole buffer and throws FormatError on any
// inconsistency; none of them reads past the end of its input.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "scv/corr_volume.hpp"
#include "scv/encoder.hpp"
#include "scv/grid.hpp"
#include "scv/io/binary.hpp"
#include "scv/knn.hpp"

namespace scv::io {

inline constexpr float kFloTag = 202021.25f;
/// Middlebury marks unknown flow with magnitudes above this threshold.
inline constexpr float kFloUnknownThreshold = 1e9f;
inline constexpr float kFloUnknownValue = 1e10f;

namespace detail {
inline constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 40;
inline constexpr std::uint32_t kMaxDim = 1u << 24;

inline std::uint32_t read_dim(ByteReader &r, const char *what) {
  const auto v = r.read<std::uint32_t>();
  if (v == 0 || v > kMaxDim)
    throw FormatError(std::string("invalid ") + what);
  return v;
}

inline float read_finite(ByteReader &r) {
  const float v = r.read<float>();
  if (!std::isfinite(v))
    throw FormatError("non-finite value in payload");
  return v;
}
} // namespace detail

// ---------------------------------------------------------------------------
// .flo

inline Bytes encode_flo(const FlowField &flow) {
  if (flow.empty())
    throw InvalidArgument("cannot write an empty flow field");
  ByteWriter w;
  w.reserve(12 + 8 * flow.size());
  w.write(kFloTag);
  w.write(static_cast<std::int32_t>(flow.width()));
  w.write(static_cast<std::int32_t>(flow.height()));
  const auto data = flow.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (flow.valid(i)) {
      w.write(data[i].u);
      w.write(data[i].v);
    } else {
      w.write(kFloUnknownValue);
      w.write(kFloUnknownValue);
    }
  }
  return w.take();
}

/// Pixels stored with unknown-flow markers become invalid in the mask.
inline FlowField decode_flo(std::span<const unsigned char> bytes) {
  ByteReader r(bytes);
  const float tag = r.read<float>();
  if (tag != kFloTag)
    throw FormatError(".flo: bad tag (expected 202021.25)");
  const auto width = r.read<std::int32_t>();
  const auto height = r.read<std::int32_t>();
  if (width <= 0 || height <= 0 || static_cast<std::uint32_t>(width) > detail::kMaxDim ||
      static_cast<std::uint32_t>(height) > detail::kMaxDim)
    throw FormatError(".flo: invalid dimensions");
  const std::uint64_t pixels = checked_product({static_cast<std::uint64_t>(width), static_cast<std::uint64_t>(height)},
                                               detail::kMaxPayload / 8);
  r.expect_exact(8 * pixels);
  std::vector<FlowVec> data(pixels);
  std::vector<std::uint8_t> mask(pixels, 1);
  bool any_invalid = false;
  for (std::size_t i = 0; i < pixels; ++i) {
    data[i].u = r.read<float>();
    data[i].v = r.read<float>();
    const bool known = std::isfinite(data[i].u) && std::isfinite(data[i].v) &&
                       std::abs(data[i].u) < kFloUnknownThreshold && std::abs(data[i].v) < kFloUnknownThreshold;
    if (!known) {
      mask[i] = 0;
      any_invalid = true;
    }
  }
  FlowField flow(height, width, std::move(data));
  if (any_invalid)
    flow.set_mask(std::move(mask));
  return flow;
}

inline void write_flo(const FlowField &flow, const std::string &path) { write_file(path, encode_flo(flow)); }
inline FlowField read_flo(const std::string &path) { return decode_flo(read_file(path)); }

// ---------------------------------------------------------------------------
// SFM1

inline Bytes encode_features(const FeatureMap &f) {
  ByteWriter w;
  w.reserve(16 + 4 * f.data().size());
  w.write_magic("SFM1");
  w.write(static_cast<std::uint32_t>(f.height()));
  w.write(static_cast<std::uint32_t>(f.width()));
  w.write(static_cast<std::uint32_t>(f.channels()));
  for (float v : f.data())
    w.write(v);
  return w.take();
}

inline FeatureMap decode_features(std::span<const unsigned char> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SFM1");
  const auto h = detail::read_dim(r, "SFM1 height");
  const auto w = detail::read_dim(r, "SFM1 width");
  const auto c = detail::read_dim(r, "SFM1 channels");
  const std::uint64_t n = checked_product({h, w, c}, detail::kMaxPayload / 4);
  r.expect_exact(4 * n);
  std::vector<float> data(n);
  for (auto &v : data)
    v = detail::read_finite(r);
  return FeatureMap(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c), std::move(data));
}

inline void write_features(const FeatureMap &f, const std::string &path) { write_file(path, encode_features(f)); }
inline FeatureMap read_features(const std::string &path) { return decode_features(read_file(path)); }

// ---------------------------------------------------------------------------
// SCV1

inline Bytes encode_volume(const SparseCorrelationVolume &v) {
  ByteWriter w;
  w.reserve(20 + 12 * v.element_count());
  w.write_magic("SCV1");
  w.write(static_cast<std::uint32_t>(v.height()));
  w.write(static_cast<std::uint32_t>(v.width()));
  w.write(static_cast<std::uint32_t>(v.k()));
  w.write(static_cast<std::uint32_t>(v.divisor()));
  for (const auto &e : v.entries()) {
    w.write(e.dx);
    w.write(e.dy);
    w.write(e.value);
  }
  return w.take();
}

inline SparseCorrelationVolume decode_volume(std::span<const unsigned char> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SCV1");
  const auto h = detail::read_dim(r, "SCV1 height");
  const auto w = detail::read_dim(r, "SCV1 width");
  const auto k = r.read<std::uint32_t>();
  const auto divisor = detail::read_dim(r, "SCV1 divisor");
  if (k > detail::kMaxDim)
    throw FormatError("invalid SCV1 k");
  const std::uint64_t n = checked_product({h, w, k}, detail::kMaxPayload / 12);
  r.expect_exact(12 * n);
  std::vector<SparseEntry> entries(n);
  for (auto &e : entries) {
    e.dx = detail::read_finite(r);
    e.dy = detail::read_finite(r);
    e.value = detail::read_finite(r);
  }
  return SparseCorrelationVolume(static_cast<int>(h), static_cast<int>(w), static_cast<int>(k),
                                 static_cast<int>(divisor), std::move(entries));
}

inline void write_volume(const SparseCorrelationVolume &v, const std::string &path) {
  write_file(path, encode_volume(v));
}
inline SparseCorrelationVolume read_volume(const std::string &path) { return decode_volume(read_file(path)); }

// ---------------------------------------------------------------------------
// SMT1

inline Bytes encode_motion(const MotionTensor &m) {
  ByteWriter w;
  w.reserve(20 + 4 * m.data().size());
  w.write_magic("SMT1");
  w.write(static_cast<std::uint32_t>(m.height()));
  w.write(static_cast<std::uint32_t>(m.width()));
  w.write(static_cast<std::uint32_t>(m.config().levels));
  w.write(static_cast<std::uint32_t>(m.config().radius));
  for (float v : m.data())
    w.write(v);
  return w.take();
}

inline MotionTensor decode_motion(std::span<const unsigned char> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SMT1");
  const auto h = detail::read_dim(r, "SMT1 height");
  const auto w = detail::read_dim(r, "SMT1 width");
  const auto levels = r.read<std::uint32_t>();
  const auto radius = r.read<std::uint32_t>();
  if (levels < 1 || levels > 30)
    throw FormatError("invalid SMT1 level count");
  if (radius < 1 || radius > (1u << 12))
    throw FormatError("invalid SMT1 radius");
  const std::uint64_t side = 2 * static_cast<std::uint64_t>(radius) + 1;
  const std::uint64_t n = checked_product({h, w, levels, side, side}, detail::kMaxPayload / 4);
  r.expect_exact(4 * n);
  std::vector<float> data(n);
  for (auto &v : data)
    v = detail::read_finite(r);
  EncoderConfig cfg{static_cast<int>(levels), static_cast<int>(radius)};
  return MotionTensor(static_cast<int>(h), static_cast<int>(w), cfg, std::move(data));
}

inline void write_motion(const MotionTensor &m, const std::string &path) { write_file(path, encode_motion(m)); }
inline MotionTensor read_motion(const std::string &path) { return decode_motion(read_file(path)); }

// ---------------------------------------------------------------------------
// SKN1

inline Bytes encode_matches(const TopKMatches &m) {
  ByteWriter w;
  w.reserve(24 + 8 * m.indices.size());
  w.write_magic("SKN1");
  w.write(static_cast<std::uint32_t>(m.height));
  w.write(static_cast<std::uint32_t>(m.width));
  w.write(static_cast<std::uint32_t>(m.target_height));
  w.write(static_cast<std::uint32_t>(m.target_width));
  w.write(static_cast<std::uint32_t>(m.k));
  for (std::size_t i = 0; i < m.indices.size(); ++i) {
    w.write(m.indices[i]);
    w.write(m.scores[i]);
  }
  return w.take();
}

inline TopKMatches decode_matches(std::span<const unsigned char> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SKN1");
  TopKMatches m;
  m.height = static_cast<int>(detail::read_dim(r, "SKN1 height"));
  m.width = static_cast<int>(detail::read_dim(r, "SKN1 width"));
  m.target_height = static_cast<int>(detail::read_dim(r, "SKN1 target height"));
  m.target_width = static_cast<int>(detail::read_dim(r, "SKN1 target width"));
  m.k = static_cast<int>(detail::read_dim(r, "SKN1 k"));
  const std::uint64_t targets = static_cast<std::uint64_t>(m.target_height) * m.target_width;
  if (static_cast<std::uint64_t>(m.k) > targets)
    throw FormatError("SKN1 k exceeds target pixel count");
  const std::uint64_t n = checked_product({static_cast<std::uint64_t>(m.height), static_cast<std::uint64_t>(m.width),
                                           static_cast<std::uint64_t>(m.k)},
                                          detail::kMaxPayload / 8);
  r.expect_exact(8 * n);
  m.indices.resize(n);
  m.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.indices[i] = r.read<std::uint32_t>();
    if (m.indices[i] >= targets)
      throw FormatError("SKN1 target index out of range");
    m.scores[i] = detail::read_finite(r);
  }
  return m;
}

inline void write_matches(const TopKMatches &m, const std::string &path) { write_file(path, encode_matches(m)); }
inline TopKMatches read_matches(const std::string &path) { return decode_matches(read_file(path)); }

} // namespace scv::io

#endif // SCV_IO_FORMATS_HPP
