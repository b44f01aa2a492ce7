#ifndef SCV_KNN_HPP
#define SCV_KNN_HPP

// Exact all-pairs top-k inner-product search.
//
// Every source descriptor is compared against every target descriptor; the k
// best targets are kept. Candidates are ranked by descending score and ties are
// broken by ascending row-major target index, so the result is a pure function
// of the inputs regardless of thread count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

#include "scv/grid.hpp"

namespace scv {

inline constexpr int kDefaultTopK = 8;

struct SearchOptions {
  /// Multiplier applied to every raw inner product (e.g. 1/sqrt(c)).
  double score_scale = 1.0;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct TopKMatches {
  int height = 0;        ///< source rows
  int width = 0;         ///< source cols
  int target_height = 0;
  int target_width = 0;
  int k = 0;
  std::vector<std::uint32_t> indices; ///< h*w*k row-major target indices
  std::vector<float> scores;          ///< h*w*k, descending per pixel

  std::span<const std::uint32_t> indices_at(std::size_t pixel) const {
    return std::span<const std::uint32_t>(indices).subspan(pixel * k, static_cast<std::size_t>(k));
  }
  std::span<const float> scores_at(std::size_t pixel) const {
    return std::span<const float>(scores).subspan(pixel * k, static_cast<std::size_t>(k));
  }

  friend bool operator==(const TopKMatches &, const TopKMatches &) = default;
};

namespace detail {

struct Candidate {
  float score;
  std::uint32_t index;
};

/// Strict total order used everywhere a top-k choice is made.
inline bool ranks_before(float sa, std::size_t ia, float sb, std::size_t ib) {
  return sa > sb || (sa == sb && ia < ib);
}

inline bool ranks_before(const Candidate &a, const Candidate &b) {
  return ranks_before(a.score, a.index, b.score, b.index);
}

/// Keeps the best `k` candidates seen so far; front() of the heap is the worst.
class BoundedTopK {
public:
  explicit BoundedTopK(std::size_t k) : k_(k) { heap_.reserve(k); }

  void offer(Candidate c) {
    auto cmp = [](const Candidate &a, const Candidate &b) { return ranks_before(a, b); };
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), cmp);
    } else if (ranks_before(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), cmp);
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(), cmp);
    }
  }

  /// Drains into best-first order.
  std::vector<Candidate> take_sorted() {
    std::sort_heap(heap_.begin(), heap_.end(),
                   [](const Candidate &a, const Candidate &b) { return ranks_before(a, b); });
    return std::move(heap_);
  }

private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

inline unsigned resolve_threads(unsigned requested, std::size_t work_items) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work_items, 1)));
}

/// Runs fn(begin, end) over [0, n) split into contiguous chunks.
template <class Fn> void parallel_ranges(std::size_t n, unsigned threads, Fn &&fn) {
  threads = resolve_threads(threads, n);
  if (threads <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end)
      break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

} // namespace detail

/// Indices of the k largest values, best first; ties go to the lower index.
inline std::vector<std::size_t> topk_select(std::span<const float> scores, std::size_t k) {
  if (k > scores.size())
    throw InvalidArgument("topk_select: k exceeds list length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return detail::ranks_before(scores[a], a, scores[b], b); });
  order.resize(k);
  return order;
}

/// For each source pixel, the k target pixels with the largest inner product.
inline TopKMatches topk_search(const FeatureMap &source, const FeatureMap &target, int k = kDefaultTopK,
                               const SearchOptions &options = {}) {
  if (source.channels() != target.channels())
    throw InvalidArgument("topk_search: channel counts differ");
  const std::size_t n_src = source.pixel_count();
  const std::size_t n_tgt = target.pixel_count();
  if (k < 1 || static_cast<std::size_t>(k) > n_tgt)
    throw InvalidArgument("topk_search: k must lie in [1, target pixel count]");
  if (n_tgt > std::size_t{UINT32_MAX})
    throw InvalidArgument("topk_search: target grid too large");

  TopKMatches out;
  out.height = source.height();
  out.width = source.width();
  out.target_height = target.height();
  out.target_width = target.width();
  out.k = k;
  out.indices.resize(n_src * static_cast<std::size_t>(k));
  out.scores.resize(n_src * static_cast<std::size_t>(k));

  const double scale = options.score_scale;
  detail::parallel_ranges(n_src, options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto query = source.descriptor(p);
      detail::BoundedTopK best(static_cast<std::size_t>(k));
      for (std::size_t t = 0; t < n_tgt; ++t) {
        const float s = static_cast<float>(scale * detail::dot_unchecked(query, target.descriptor(t)));
        best.offer({s, static_cast<std::uint32_t>(t)});
      }
      const auto sorted = best.take_sorted();
      for (std::size_t j = 0; j < sorted.size(); ++j) {
        out.indices[p * k + j] = sorted[j].index;
        out.scores[p * k + j] = sorted[j].score;
      }
    }
  });
  detail::inner_product_counter.fetch_add(static_cast<std::uint64_t>(n_src) * n_tgt, std::memory_order_relaxed);
  return out;
}

} // namespace scv

#endif // SCV_KNN_HPP
