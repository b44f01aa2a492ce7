#ifndef SCV_ESTIMATOR_HPP
#define SCV_ESTIMATOR_HPP

// Iterative refinement: the sparse volume is built once, then each step shifts
// its displacements by the previous residual, encodes it, and asks an update
// operator for the next residual. Flow starts at zero and accumulates.

#include <cmath>
#include <functional>
#include <vector>

#include "scv/corr_volume.hpp"
#include "scv/displacement.hpp"
#include "scv/encoder.hpp"

namespace scv {

/// Produces the residual flow for one iteration.
///
/// A learned recurrent block would also carry a hidden state and consume
/// context features of the first image; implementations that need them can
/// keep such state as members.
class UpdateOperator {
public:
  virtual ~UpdateOperator() = default;
  /// `iteration` is 1-based. Must return a field with the motion tensor's dims.
  virtual FlowField operator()(const MotionTensor &motion, const FlowField &flow, int iteration) = 0;
};

/// Softmax-weighted mean of the window displacements at one pyramid level,
/// scaled back to level-1 pixels.
inline FlowField soft_argmax_update(const MotionTensor &motion, int level = 1, double temperature = 1.0) {
  const EncoderConfig &cfg = motion.config();
  if (level < 1 || level > cfg.levels)
    throw InvalidArgument("soft_argmax_update: level out of range");
  detail::require(temperature > 0.0 && std::isfinite(temperature), "temperature must be positive");
  const int size = cfg.window_size();
  const int r = cfg.radius;
  const double scale = static_cast<double>(cfg.level_divisor(level));
  FlowField out(motion.height(), motion.width());
  auto dst = out.data();
  std::vector<double> weights(static_cast<std::size_t>(cfg.cells_per_level()));
  for (std::size_t p = 0; p < dst.size(); ++p) {
    const auto cells = motion.level(p, level);
    double peak = -INFINITY;
    for (float c : cells)
      peak = std::max(peak, temperature * c);
    double total = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      weights[c] = std::exp(temperature * cells[c] - peak);
      total += weights[c];
    }
    double u = 0.0;
    double v = 0.0;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const double w = weights[static_cast<std::size_t>((dy + r) * size + dx + r)] / total;
        u += w * dx;
        v += w * dy;
      }
    dst[p] = {static_cast<float>(u * scale), static_cast<float>(v * scale)};
  }
  return out;
}

/// UpdateOperator wrapper around soft_argmax_update.
class SoftArgmaxUpdate final : public UpdateOperator {
public:
  explicit SoftArgmaxUpdate(double temperature = 1.0, int level = 1) : temperature_(temperature), level_(level) {}

  FlowField operator()(const MotionTensor &motion, const FlowField &, int) override {
    return soft_argmax_update(motion, level_, temperature_);
  }

private:
  double temperature_;
  int level_;
};

struct EstimatorConfig {
  int iterations = 8;
  int k = kDefaultTopK;
  EncoderConfig encoder;
  double temperature = 1.0;
  SearchOptions search;

  void validate() const {
    detail::require(iterations >= 1, "iterations must be >= 1");
    detail::require(k >= 1, "k must be >= 1");
    detail::require(temperature > 0.0, "temperature must be positive");
    encoder.validate();
  }
};

/// Called at the start of every iteration with the shifted volume and the flow
/// accumulated so far (before this iteration's residual is added).
using IterationObserver =
    std::function<void(int iteration, const SparseCorrelationVolume &volume, const FlowField &flow)>;

/// Runs exactly cfg.iterations steps and returns f_1..f_N at feature resolution.
inline std::vector<FlowField> estimate_flow(const FeatureMap &f1, const FeatureMap &f2, const EstimatorConfig &cfg,
                                            UpdateOperator &op, const IterationObserver &observer = {}) {
  cfg.validate();
  SparseCorrelationVolume volume = build_sparse(f1, f2, cfg.k, cfg.search);
  FlowField flow(f1.height(), f1.width());
  FlowField residual(f1.height(), f1.width());
  std::vector<FlowField> sequence;
  sequence.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int i = 1; i <= cfg.iterations; ++i) {
    volume = shift_volume(volume, residual);
    if (observer)
      observer(i, volume, flow);
    const MotionTensor motion = encode(volume, cfg.encoder);
    residual = op(motion, flow, i);
    if (!residual.same_shape(flow))
      throw InvalidArgument("update operator returned a field with wrong dims");
    flow = accumulate_flow(flow, residual);
    sequence.push_back(flow);
  }
  return sequence;
}

inline std::vector<FlowField> estimate_flow(const FeatureMap &f1, const FeatureMap &f2,
                                            const EstimatorConfig &cfg = {}) {
  SoftArgmaxUpdate op(cfg.temperature);
  return estimate_flow(f1, f2, cfg, op);
}

} // namespace scv

#endif // SCV_ESTIMATOR_HPP
