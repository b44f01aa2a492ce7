// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds are fixed here and never tuned at run time.

#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <optional>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scv/scv.hpp"

namespace {

using namespace scv;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Report {
public:
  void run(int id, const std::string &name, const std::function<Outcome()> &fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    std::printf("[%s] %d. %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), dt, o.detail.c_str());
    std::fflush(stdout);
    failures_ += o.pass ? 0 : 1;
  }
  int failures() const { return failures_; }

private:
  int failures_ = 0;
};

// ---------------------------------------------------------------------------
// 1. Memory accounting for a 436x1024 pair, dense and k = 8/32/128.

Outcome memory_rows() {
  const auto t0 = Clock::now();
  struct Row {
    int divisor;
    std::optional<int> k;
    std::uint64_t elements;
    const char *memory;  // two decimals (integer at >= 100 units)
    const char *rounded; // one decimal
    const char *size;
  };
  const Row rows[] = {
      {4, std::nullopt, 778633216ULL, "3.11 GB", "3.1 GB", "7.8e8"},
      {4, 8, 223232, "0.89 MB", "0.9 MB", "2.2e5"},
      {4, 32, 892928, "3.57 MB", "3.6 MB", "8.9e5"},
      {4, 128, 3571712, "14.29 MB", "14.3 MB", "3.6e6"},
      {8, std::nullopt, 47775744ULL, "191 MB", "191 MB", "4.8e7"},
      {8, 8, 55296, "0.22 MB", "0.2 MB", "5.5e4"},
      {8, 32, 221184, "0.88 MB", "0.9 MB", "2.2e5"},
      {8, 128, 884736, "3.54 MB", "3.5 MB", "8.8e5"},
  };
  Outcome o;
  int matched = 0;
  for (const auto &row : rows) {
    const auto r = memory_report(436, 1024, row.divisor, row.k);
    const bool ok = r.element_count == row.elements && r.bytes == 4 * row.elements &&
                    format_bytes(r.bytes, 2) == row.memory && format_bytes(r.bytes, 1) == row.rounded &&
                    format_scientific(r.element_count) == row.size;
    matched += ok;
    if (!ok) {
      o.pass = false;
      o.detail += "mismatch at divisor " + std::to_string(row.divisor) + (row.k ? " k=" + std::to_string(*row.k) : " dense") + "; ";
    }
  }
  const auto table_rows_ok = table_rows().size() == 8;
  const double dt = seconds_since(t0);
  o.pass = o.pass && table_rows_ok && dt < 1.0;
  o.detail += std::to_string(matched) + "/8 rows exact";
  return o;
}

// ---------------------------------------------------------------------------
// 2. build_sparse == sparsify_topk(build_dense) on random instances.

Outcome sparse_dense_equivalence() {
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<int> dim(1, 16), chans(1, 32);
  const int instances = 1200;
  int agree = 0;
  for (int i = 0; i < instances; ++i) {
    const int h = dim(rng), w = dim(rng), h2 = dim(rng), w2 = dim(rng), c = chans(rng);
    const int kmax = std::min(12, h2 * w2);
    const int k = std::uniform_int_distribution<int>(1, kmax)(rng);
    const bool ties = i % 4 == 0;
    const auto a = testing::random_features(rng, h, w, c, ties);
    const auto b = testing::random_features(rng, h2, w2, c, ties);
    agree += build_sparse(a, b, k) == sparsify_topk(build_dense(a, b), k);
  }
  return {agree == instances, std::to_string(agree) + "/" + std::to_string(instances) + " instances identical"};
}

// ---------------------------------------------------------------------------
// 3. Splat mass conservation and zero out-of-grid writes.

Outcome splat_mass() {
  std::mt19937 rng(777);
  const int volumes = 1200;
  int ok_volumes = 0;
  double worst = 0.0;
  std::size_t out_of_grid = 0;
  for (int i = 0; i < volumes; ++i) {
    const EncoderConfig cfg{1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 4)};
    const int h = 1 + static_cast<int>(rng() % 4), w = 1 + static_cast<int>(rng() % 4), k = 1 + static_cast<int>(rng() % 12);
    const auto v = testing::random_volume(rng, h, w, k, 40.0f, i % 3 == 0);
    EncodeStats stats;
    const auto m = encode(v, cfg, &stats);
    out_of_grid += stats.out_of_grid_writes;
    bool ok = stats.out_of_grid_writes == 0;
    for (std::size_t p = 0; p < v.pixel_count(); ++p)
      for (int level = 1; level <= cfg.levels; ++level) {
        const double div = std::ldexp(1.0, level - 1);
        double windowed = 0.0, scale = 0.0;
        for (const auto &e : v.entries_at(p))
          if (std::abs(e.dx / div) <= cfg.radius && std::abs(e.dy / div) <= cfg.radius) {
            windowed += e.value;
            scale += std::abs(e.value);
          }
        double sum = 0.0;
        for (float c : m.level(p, level))
          sum += c;
        const double rel = std::abs(sum - windowed) / std::max(1e-30, scale);
        if (scale > 0)
          worst = std::max(worst, rel);
        ok = ok && (scale == 0 ? sum == 0.0 : rel <= 1e-5);
      }
    ok_volumes += ok;
  }
  std::ostringstream d;
  d << ok_volumes << "/" << volumes << " volumes, worst relative error " << worst << ", out-of-grid writes "
    << out_of_grid;
  return {ok_volumes == volumes && out_of_grid == 0, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Shift laws with quarter-pixel deltas.

Outcome shift_laws() {
  std::mt19937 rng(4242);
  const int trials = 1200;
  int ok_trials = 0;
  for (int i = 0; i < trials; ++i) {
    const int h = 1 + static_cast<int>(rng() % 5), w = 1 + static_cast<int>(rng() % 5), k = 1 + static_cast<int>(rng() % 8);
    const auto v0 = testing::random_volume(rng, h, w, k, 32.0f);
    const auto a = testing::random_quarter_flow(rng, h, w, 6);
    const auto b = testing::random_quarter_flow(rng, h, w, 6);
    const auto shifted = shift_volume(shift_volume(v0, a), b);
    const auto flow = accumulate_flow(a, b);
    bool ok = shifted == shift_volume(v0, flow); // composition
    for (std::size_t p = 0; p < v0.pixel_count() && ok; ++p)
      for (int j = 0; j < k; ++j) {
        const auto &e = shifted.entries_at(p)[j];
        const auto &e0 = v0.entries_at(p)[j];
        ok = ok && e.value == e0.value;                                    // value preservation
        ok = ok && e.dx + flow.data()[p].u == e0.dx && e.dy + flow.data()[p].v == e0.dy; // absolute position
      }
    ok_trials += ok;
  }
  return {ok_trials == trials, std::to_string(ok_trials) + "/" + std::to_string(trials) + " trials exact"};
}

// ---------------------------------------------------------------------------
// 5 & 6. End-to-end synthetic translation.

struct SyntheticCase {
  const char *name;
  int tx, ty;
};
constexpr SyntheticCase kSuite[] = {{"identity", 0, 0}, {"shift (2,0)", 2, 0}, {"shift (-3,1)", -3, 1}};
constexpr int kSide = 64;
constexpr int kMargin = 8; // excludes census padding and wrap-around seams
constexpr int kCensusRadius = 3;

double synthetic_epe(const SyntheticCase &sc, int k, double *seconds = nullptr) {
  const auto t0 = Clock::now();
  const auto img1 = synthetic::textured_image(kSide, kSide, 2024);
  const auto img2 = synthetic::translate_circular(img1, sc.tx, sc.ty);
  const auto f1 = census_features(img1, kCensusRadius);
  const auto f2 = census_features(img2, kCensusRadius);
  EstimatorConfig cfg;
  cfg.k = k;
  cfg.iterations = 8;
  cfg.encoder = {5, 3};
  const auto seq = estimate_flow(f1, f2, cfg);
  // Features are at full resolution; upsampling by 1 is the identity.
  const auto flow = upsample_flow(seq.back(), 1);
  const auto gt = synthetic::translation_ground_truth(kSide, kSide, sc.tx, sc.ty, kMargin);
  if (seconds)
    *seconds = seconds_since(t0);
  return endpoint_error(flow, gt);
}

Outcome end_to_end() {
  Outcome o;
  char buf[128];
  for (const auto &sc : kSuite) {
    double secs = 0.0;
    const double epe = synthetic_epe(sc, 8, &secs);
    const double limit = (sc.tx == 0 && sc.ty == 0) ? 0.25 : 1.0;
    const bool ok = epe < limit && secs < 30.0;
    o.pass = o.pass && ok;
    std::snprintf(buf, sizeof buf, "%s EPE %.4f (< %.2f) %.1fs; ", sc.name, epe, limit, secs);
    o.detail += buf;
  }
  return o;
}

Outcome k_monotonicity() {
  Outcome o;
  double sum1 = 0.0, sum8 = 0.0;
  char buf[128];
  for (const auto &sc : kSuite) {
    const double e1 = synthetic_epe(sc, 1);
    const double e8 = synthetic_epe(sc, 8);
    sum1 += e1;
    sum8 += e8;
    const bool identity = sc.tx == 0 && sc.ty == 0;
    // With an exact self-match k=1 is already perfect on the identity pair, so
    // that case is reported but only enters through the suite mean.
    if (!identity)
      o.pass = o.pass && e8 <= e1;
    std::snprintf(buf, sizeof buf, "%s k=8 %.4f vs k=1 %.4f%s; ", sc.name, e8, e1, identity ? " (logged)" : "");
    o.detail += buf;
  }
  o.pass = o.pass && sum8 <= sum1;
  std::snprintf(buf, sizeof buf, "suite mean k=8 %.4f vs k=1 %.4f", sum8 / 3, sum1 / 3);
  o.detail += buf;
  return o;
}

// ---------------------------------------------------------------------------
// 7. Element-count law and timing scaling.

Outcome complexity_scaling() {
  const int c = 32;
  std::mt19937 rng(99);
  bool law = true;
  std::vector<double> log_n, log_t;
  std::string detail;
  char buf[160];
  for (int side : {12, 16, 24, 32, 48}) {
    const auto a = testing::random_features(rng, side, side, c);
    const auto b = testing::random_features(rng, side, side, c);
    const std::uint64_t n = static_cast<std::uint64_t>(side) * side;
    for (int k : {1, 8, 32}) {
      auto t0 = Clock::now();
      const auto vol = build_sparse(a, b, k, {1.0, 1});
      const double knn_s = seconds_since(t0);
      t0 = Clock::now();
      const auto m = encode(vol);
      const double enc_s = seconds_since(t0);
      law = law && vol.element_count() == n * static_cast<std::uint64_t>(k) &&
            memory_report(side, side, 1, k).element_count == vol.element_count() && m.height() == side;
      if (k == 8) {
        log_n.push_back(std::log(static_cast<double>(n)));
        log_t.push_back(std::log(std::max(knn_s, 1e-9)));
        std::snprintf(buf, sizeof buf, "N=%llu knn %.4fs encode %.4fs; ", static_cast<unsigned long long>(n), knn_s, enc_s);
        detail += buf;
      }
    }
  }
  // Least-squares slope of log(time) against log(N); logged, not asserted.
  const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / log_n.size();
  const double my = std::accumulate(log_t.begin(), log_t.end(), 0.0) / log_t.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    num += (log_n[i] - mx) * (log_t[i] - my);
    den += (log_n[i] - mx) * (log_n[i] - mx);
  }
  std::snprintf(buf, sizeof buf, "search time exponent in N: %.2f (expect ~2); element law %s", num / den,
                law ? "exact" : "VIOLATED");
  detail += buf;
  return {law, detail};
}

// ---------------------------------------------------------------------------
// 8. Format round trips and malformed-input corpus.

template <class Decode> bool survives(const io::Bytes &b, Decode decode, int &rejected, int &crashed) {
  try {
    decode(b);
  } catch (const FormatError &) {
    ++rejected;
  } catch (...) {
    ++crashed;
    return false;
  }
  return true;
}

Outcome format_robustness() {
  std::mt19937 rng(31337);
  // Round trips.
  bool lossless = true;
  std::vector<io::Bytes> seeds;
  for (int i = 0; i < 50; ++i) {
    const int h = 1 + i % 5, w = 1 + (i * 7) % 6;
    FlowField f(h, w);
    std::normal_distribution<float> d(0, 50);
    for (auto &v : f.data())
      v = {d(rng), d(rng)};
    const auto flo = io::encode_flo(f);
    lossless = lossless && io::decode_flo(flo) == f && io::encode_flo(io::decode_flo(flo)) == flo;

    const auto feat = testing::random_features(rng, h, w, 1 + i % 9);
    const auto sfm = io::encode_features(feat);
    lossless = lossless && io::decode_features(sfm) == feat;

    const auto vol = testing::random_volume(rng, h, w, i % 6, 20.0f, i % 2 == 0);
    const auto scv = io::encode_volume(vol);
    lossless = lossless && io::decode_volume(scv) == vol;

    const auto motion = encode(vol, {1 + i % 5, 1 + i % 3});
    const auto smt = io::encode_motion(motion);
    lossless = lossless && io::decode_motion(smt) == motion;

    const auto matches = topk_search(feat, feat, 1);
    const auto skn = io::encode_matches(matches);
    lossless = lossless && io::decode_matches(skn) == matches;
    for (auto *b : {&flo, &sfm, &scv, &smt, &skn})
      seeds.push_back(*b);
  }

  // Malformed corpus: mutations of valid files plus pure noise.
  int rejected = 0, crashed = 0, accepted = 0;
  const int corpus = 10000;
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < corpus; ++i) {
    io::Bytes b = seeds[rng() % seeds.size()];
    switch (i % 6) {
    case 0: // bit flips
      for (int f = 0; f < 1 + static_cast<int>(rng() % 4) && !b.empty(); ++f)
        b[rng() % b.size()] ^= static_cast<unsigned char>(1u << (rng() % 8));
      break;
    case 1: // truncation
      b.resize(rng() % (b.size() + 1));
      break;
    case 2: // trailing garbage
      for (int n = 1 + static_cast<int>(rng() % 16); n > 0; --n)
        b.push_back(static_cast<unsigned char>(byte(rng)));
      break;
    case 3: // random header words
      for (std::size_t p = 4; p < std::min<std::size_t>(b.size(), 24); ++p)
        if (rng() % 3 == 0)
          b[p] = static_cast<unsigned char>(byte(rng));
      break;
    case 4: // extreme dimension values
      if (b.size() >= 8) {
        const std::uint32_t vals[] = {0u, 1u, 0x7fffffffu, 0xffffffffu, 0x10000u};
        const std::uint32_t v = vals[rng() % 5];
        std::memcpy(b.data() + 4 + 4 * (rng() % std::max<std::size_t>(1, std::min<std::size_t>(5, (b.size() - 4) / 4))), &v, 4);
      }
      break;
    default: // pure noise
      b.assign(rng() % 64, 0);
      for (auto &x : b)
        x = static_cast<unsigned char>(byte(rng));
    }
    const int before = rejected;
    survives(b, [](const io::Bytes &x) { io::decode_flo(x); }, rejected, crashed);
    survives(b, [](const io::Bytes &x) { io::decode_features(x); }, rejected, crashed);
    survives(b, [](const io::Bytes &x) { io::decode_volume(x); }, rejected, crashed);
    survives(b, [](const io::Bytes &x) { io::decode_motion(x); }, rejected, crashed);
    survives(b, [](const io::Bytes &x) { io::decode_matches(x); }, rejected, crashed);
    accepted += 5 - (rejected - before);
  }
  std::ostringstream d;
  d << "round trips " << (lossless ? "bitwise lossless" : "LOSSY") << "; " << corpus << " malformed inputs x 5 readers: "
    << rejected << " rejected, " << accepted << " parsed, " << crashed << " crashed";
  return {lossless && crashed == 0, d.str()};
}

} // namespace

int main() {
  Report report;
  report.run(1, "memory accounting for a 436x1024 pair", memory_rows);
  report.run(2, "sparse/dense oracle equivalence", sparse_dense_equivalence);
  report.run(3, "splatting mass conservation", splat_mass);
  report.run(4, "shift-invariance laws", shift_laws);
  report.run(5, "end-to-end synthetic flow", end_to_end);
  report.run(6, "k-monotonicity", k_monotonicity);
  report.run(7, "complexity scaling", complexity_scaling);
  report.run(8, "format robustness", format_robustness);
  std::printf("%s: %d failure(s)\n", report.failures() == 0 ? "ACCEPTED" : "REJECTED", report.failures());
  return report.failures() == 0 ? 0 : 1;
}
