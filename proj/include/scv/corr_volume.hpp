#ifndef SCV_CORR_VOLUME_HPP
#define SCV_CORR_VOLUME_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scv/grid.hpp"
#include "scv/knn.hpp"

namespace scv {

/// One retained correlation: displacement (target - source, in feature pixels)
/// and its inner product.
struct SparseEntry {
  float dx = 0.0f;
  float dy = 0.0f;
  float value = 0.0f;

  friend bool operator==(const SparseEntry &, const SparseEntry &) = default;
};

/// Per source pixel, k {displacement, value} pairs. Values are fixed once the
/// volume is built; only displacements move when the volume is shifted.
class SparseCorrelationVolume {
public:
  SparseCorrelationVolume() = default;
  SparseCorrelationVolume(int height, int width, int k, int divisor, std::vector<SparseEntry> entries)
      : height_(height), width_(width), k_(k), divisor_(divisor), entries_(std::move(entries)) {
    detail::require(height >= 1 && width >= 1, "sparse volume dimensions must be positive");
    detail::require(k >= 0, "sparse volume k must be non-negative");
    detail::require(divisor >= 1, "resolution divisor must be positive");
    detail::require(entries_.size() == pixel_count() * static_cast<std::size_t>(k),
                    "sparse volume must hold exactly h*w*k entries");
    for (const auto &e : entries_)
      detail::require(std::isfinite(e.dx) && std::isfinite(e.dy) && std::isfinite(e.value),
                      "sparse volume entries must be finite");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int k() const { return k_; }
  int divisor() const { return divisor_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  /// Number of stored correlation values (h*w*k).
  std::size_t element_count() const { return entries_.size(); }

  std::span<const SparseEntry> entries() const { return entries_; }
  std::span<const SparseEntry> entries_at(std::size_t pixel) const {
    return std::span<const SparseEntry>(entries_).subspan(pixel * static_cast<std::size_t>(k_),
                                                          static_cast<std::size_t>(k_));
  }
  std::span<const SparseEntry> entries_at(int row, int col) const {
    return entries_at(static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                      static_cast<std::size_t>(col));
  }

  friend bool operator==(const SparseCorrelationVolume &, const SparseCorrelationVolume &) = default;

private:
  int height_ = 0;
  int width_ = 0;
  int k_ = 0;
  int divisor_ = 1;
  std::vector<SparseEntry> entries_;
};

/// All-pairs h x w x h2 x w2 volume. Test-scale only.
class DenseCorrelationVolume {
public:
  DenseCorrelationVolume() = default;
  DenseCorrelationVolume(int height, int width, int target_height, int target_width, std::vector<float> values)
      : h_(height), w_(width), h2_(target_height), w2_(target_width), values_(std::move(values)) {
    detail::require(height >= 1 && width >= 1 && target_height >= 1 && target_width >= 1,
                    "dense volume dimensions must be positive");
    detail::require(values_.size() == source_pixels() * target_pixels(),
                    "dense volume must hold h*w*h2*w2 values");
    for (float v : values_)
      detail::require(std::isfinite(v), "dense volume values must be finite");
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int target_height() const { return h2_; }
  int target_width() const { return w2_; }
  std::size_t source_pixels() const { return static_cast<std::size_t>(h_) * static_cast<std::size_t>(w_); }
  std::size_t target_pixels() const { return static_cast<std::size_t>(h2_) * static_cast<std::size_t>(w2_); }
  std::size_t element_count() const { return values_.size(); }

  /// Correlation row of one source pixel, indexed by row-major target pixel.
  std::span<const float> row(std::size_t source_pixel) const {
    return std::span<const float>(values_).subspan(source_pixel * target_pixels(), target_pixels());
  }
  float at(int row, int col, int target_row, int target_col) const {
    const std::size_t src = static_cast<std::size_t>(row) * w_ + col;
    const std::size_t tgt = static_cast<std::size_t>(target_row) * w2_ + target_col;
    return values_[src * target_pixels() + tgt];
  }
  std::span<const float> values() const { return values_; }

  friend bool operator==(const DenseCorrelationVolume &, const DenseCorrelationVolume &) = default;

private:
  int h_ = 0, w_ = 0, h2_ = 0, w2_ = 0;
  std::vector<float> values_;
};

/// Upper bound on dense volume size accepted by build_dense (64M floats).
inline constexpr std::size_t kDefaultDenseBudget = std::size_t{1} << 26;

namespace detail {

inline SparseEntry entry_for_target(std::size_t source_pixel, int source_width, std::uint32_t target_index,
                                    int target_width, float value) {
  const int sy = static_cast<int>(source_pixel / static_cast<std::size_t>(source_width));
  const int sx = static_cast<int>(source_pixel % static_cast<std::size_t>(source_width));
  const int ty = static_cast<int>(target_index / static_cast<std::uint32_t>(target_width));
  const int tx = static_cast<int>(target_index % static_cast<std::uint32_t>(target_width));
  return {static_cast<float>(tx - sx), static_cast<float>(ty - sy), value};
}

} // namespace detail

/// Converts top-k matches into displacement form (d = y - x).
inline SparseCorrelationVolume to_sparse_volume(const TopKMatches &m, int divisor = 1) {
  std::vector<SparseEntry> entries;
  entries.reserve(m.indices.size());
  const std::size_t n = static_cast<std::size_t>(m.height) * static_cast<std::size_t>(m.width);
  for (std::size_t p = 0; p < n; ++p) {
    const auto idx = m.indices_at(p);
    const auto sc = m.scores_at(p);
    for (std::size_t j = 0; j < idx.size(); ++j)
      entries.push_back(detail::entry_for_target(p, m.width, idx[j], m.target_width, sc[j]));
  }
  return SparseCorrelationVolume(m.height, m.width, m.k, divisor, std::move(entries));
}

/// Sparse volume holding the k strongest correlations of every source pixel.
inline SparseCorrelationVolume build_sparse(const FeatureMap &f1, const FeatureMap &f2, int k = kDefaultTopK,
                                            const SearchOptions &options = {}, int divisor = 1) {
  return to_sparse_volume(topk_search(f1, f2, k, options), divisor);
}

/// Every pairwise inner product. Throws BudgetExceeded above `budget` elements.
inline DenseCorrelationVolume build_dense(const FeatureMap &f1, const FeatureMap &f2,
                                          const SearchOptions &options = {},
                                          std::size_t budget = kDefaultDenseBudget) {
  if (f1.channels() != f2.channels())
    throw InvalidArgument("build_dense: channel counts differ");
  const std::size_t n1 = f1.pixel_count();
  const std::size_t n2 = f2.pixel_count();
  if (n2 != 0 && n1 > budget / n2)
    throw BudgetExceeded("dense correlation volume exceeds the element budget; use the sparse path");
  std::vector<float> values(n1 * n2);
  for (std::size_t p = 0; p < n1; ++p) {
    const auto a = f1.descriptor(p);
    for (std::size_t t = 0; t < n2; ++t)
      values[p * n2 + t] = static_cast<float>(options.score_scale * detail::dot_unchecked(a, f2.descriptor(t)));
  }
  detail::inner_product_counter.fetch_add(static_cast<std::uint64_t>(n1) * n2, std::memory_order_relaxed);
  return DenseCorrelationVolume(f1.height(), f1.width(), f2.height(), f2.width(), std::move(values));
}

/// Keeps the k largest values of each correlation row; everything else is
/// treated as zero (dropped).
inline SparseCorrelationVolume sparsify_topk(const DenseCorrelationVolume &vol, int k, int divisor = 1) {
  if (k < 0 || static_cast<std::size_t>(k) > vol.target_pixels())
    throw InvalidArgument("sparsify_topk: k must lie in [0, h2*w2]");
  std::vector<SparseEntry> entries;
  entries.reserve(vol.source_pixels() * static_cast<std::size_t>(k));
  for (std::size_t p = 0; p < vol.source_pixels(); ++p) {
    const auto row = vol.row(p);
    for (std::size_t t : topk_select(row, static_cast<std::size_t>(k)))
      entries.push_back(detail::entry_for_target(p, vol.width(), static_cast<std::uint32_t>(t),
                                                 vol.target_width(), row[t]));
  }
  return SparseCorrelationVolume(vol.height(), vol.width(), k, divisor, std::move(entries));
}

/// Scatters stored entries back into an all-zero dense volume. Rejects
/// non-integer (already shifted) or out-of-range displacements.
inline DenseCorrelationVolume densify(const SparseCorrelationVolume &scv, int target_height, int target_width,
                                      std::size_t budget = kDefaultDenseBudget) {
  detail::require(target_height >= 1 && target_width >= 1, "densify: target dims must be positive");
  const std::size_t n1 = scv.pixel_count();
  const std::size_t n2 = static_cast<std::size_t>(target_height) * static_cast<std::size_t>(target_width);
  if (n1 > budget / n2)
    throw BudgetExceeded("dense correlation volume exceeds the element budget");
  std::vector<float> values(n1 * n2, 0.0f);
  std::vector<std::uint8_t> written(n1 * n2, 0);
  for (int row = 0; row < scv.height(); ++row) {
    for (int col = 0; col < scv.width(); ++col) {
      const std::size_t p = static_cast<std::size_t>(row) * scv.width() + col;
      for (const auto &e : scv.entries_at(p)) {
        if (e.dx != std::floor(e.dx) || e.dy != std::floor(e.dy))
          throw InvalidArgument("densify: displacement is not integer-valued");
        const double tx = col + static_cast<double>(e.dx);
        const double ty = row + static_cast<double>(e.dy);
        if (tx < 0 || ty < 0 || tx >= target_width || ty >= target_height)
          throw InvalidArgument("densify: displacement points outside the target grid");
        const std::size_t t = static_cast<std::size_t>(ty) * target_width + static_cast<std::size_t>(tx);
        if (written[p * n2 + t])
          throw InvalidArgument("densify: duplicate displacement at one pixel");
        written[p * n2 + t] = 1;
        values[p * n2 + t] = e.value;
      }
    }
  }
  return DenseCorrelationVolume(scv.height(), scv.width(), target_height, target_width, std::move(values));
}

} // namespace scv

#endif // SCV_CORR_VOLUME_HPP
