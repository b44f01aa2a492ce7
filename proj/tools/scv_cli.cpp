// Command-line front end for the sparse correlation volume pipeline.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scv/png_io.hpp"
#include "scv/scv.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PairArgs {
  std::string f1, f2, out;
  int k = scv::kDefaultTopK;
  double scale = 1.0;
  unsigned threads = 0;
};

void add_pair_options(CLI::App *cmd, PairArgs &a) {
  cmd->add_option("--f1", a.f1, "Source feature map (SFM1)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--f2", a.f2, "Target feature map (SFM1)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-k", a.k, "Matches kept per pixel")->check(CLI::PositiveNumber);
  cmd->add_option("--scale", a.scale, "Multiplier applied to inner products");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--out", a.out, "Output file")->required();
}

int run_knn(const PairArgs &a) {
  const auto f1 = scv::io::read_features(a.f1);
  const auto f2 = scv::io::read_features(a.f2);
  const auto m = scv::topk_search(f1, f2, a.k, {a.scale, a.threads});
  scv::io::write_matches(m, a.out);
  std::printf("%dx%d pixels, k=%d -> %s\n", m.height, m.width, m.k, a.out.c_str());
  return 0;
}

int run_build(const PairArgs &a, int divisor) {
  const auto f1 = scv::io::read_features(a.f1);
  const auto f2 = scv::io::read_features(a.f2);
  const auto vol = scv::build_sparse(f1, f2, a.k, {a.scale, a.threads}, divisor);
  scv::io::write_volume(vol, a.out);
  std::printf("%dx%d pixels, k=%d, %zu elements -> %s\n", vol.height(), vol.width(), vol.k(), vol.element_count(),
              a.out.c_str());
  return 0;
}

int run_encode(const std::string &vol_path, const scv::EncoderConfig &cfg, const std::string &out) {
  const auto vol = scv::io::read_volume(vol_path);
  scv::EncodeStats stats;
  const auto m = scv::encode(vol, cfg, &stats);
  scv::io::write_motion(m, out);
  std::printf("%dx%d pixels, %d channels, %zu windowed entries -> %s\n", m.height(), m.width(), m.channels(),
              stats.kept_entries, out.c_str());
  return 0;
}

struct EstimateArgs {
  std::string img1, img2, out, viz;
  int k = scv::kDefaultTopK;
  int iterations = 8;
  int radius = 3;
  int levels = 5;
  int census_radius = 3;
  int divisor = 1;
  double temperature = 1.0;
  unsigned threads = 0;
};

int run_estimate(const EstimateArgs &a) {
  const auto img1 = scv::io::read_png_gray(a.img1);
  const auto img2 = scv::io::read_png_gray(a.img2);
  if (!img1.same_shape(img2))
    throw scv::InvalidArgument("input images have different sizes");
  const auto f1 = scv::census_features(scv::box_downsample(img1, a.divisor), a.census_radius);
  const auto f2 = scv::census_features(scv::box_downsample(img2, a.divisor), a.census_radius);
  scv::EstimatorConfig cfg;
  cfg.iterations = a.iterations;
  cfg.k = a.k;
  cfg.encoder = {a.levels, a.radius};
  cfg.temperature = a.temperature;
  cfg.search.threads = a.threads;
  const auto t0 = Clock::now();
  const auto seq = scv::estimate_flow(f1, f2, cfg);
  const auto flow = scv::upsample_flow_to(seq.back(), a.divisor, img1.height(), img1.width());
  scv::io::write_flo(flow, a.out);
  if (!a.viz.empty())
    scv::io::write_png_rgb(scv::flow_to_color(flow), a.viz);
  std::printf("%dx%d flow (features %dx%d, k=%d, N=%d) in %.2f s -> %s\n", flow.height(), flow.width(), f1.height(),
              f1.width(), a.k, a.iterations, seconds_since(t0), a.out.c_str());
  return 0;
}

int run_eval(const std::string &flow_path, const std::string &gt_path, const std::string &mask_path) {
  const auto flow = scv::io::read_flo(flow_path);
  auto gt = scv::io::read_flo(gt_path);
  if (!flow.same_shape(gt))
    throw scv::InvalidArgument("flow and ground truth have different sizes");
  if (!mask_path.empty()) {
    const auto mask_img = scv::io::read_png_gray(mask_path);
    if (mask_img.height() != gt.height() || mask_img.width() != gt.width())
      throw scv::InvalidArgument("mask size differs from ground truth");
    std::vector<std::uint8_t> mask(gt.size());
    const auto m = mask_img.data();
    for (std::size_t i = 0; i < mask.size(); ++i)
      mask[i] = (m[i] > 0.0f && gt.valid(i)) ? 1 : 0;
    gt.set_mask(std::move(mask));
  }
  std::printf("EPE %.3f, F1-all %.2f%%\n", scv::endpoint_error(flow, gt), scv::f1_all(flow, gt));
  return 0;
}

int run_memory_report(int height, int width, int divisor, int k, bool dense, bool table) {
  if (table) {
    std::fputs(scv::format_table(height, width).c_str(), stdout);
    return 0;
  }
  const auto r = scv::memory_report(height, width, divisor, dense ? std::nullopt : std::optional<int>(k));
  std::fputs(scv::format_report(r).c_str(), stdout);
  return 0;
}

/// Random features with a fixed seed; used by `bench`.
scv::FeatureMap random_features(int h, int w, int c, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> dist;
  std::vector<float> data(static_cast<std::size_t>(h) * w * c);
  for (float &v : data)
    v = dist(rng);
  return scv::FeatureMap(h, w, c, std::move(data));
}

int run_bench(const std::vector<int> &sizes, const std::vector<int> &ks, int channels, unsigned threads) {
  bool ok = true;
  std::printf("%6s %8s %5s %12s %12s %10s %10s %14s\n", "side", "pixels", "k", "elements", "expected", "knn_s",
              "encode_s", "knn_ns/(N^2c)");
  for (int side : sizes) {
    const auto f1 = random_features(side, side, channels, 1);
    const auto f2 = random_features(side, side, channels, 2);
    const std::uint64_t n = static_cast<std::uint64_t>(side) * side;
    for (int k : ks) {
      if (static_cast<std::uint64_t>(k) > n)
        continue;
      auto t0 = Clock::now();
      const auto vol = scv::build_sparse(f1, f2, k, {1.0, threads});
      const double knn_s = seconds_since(t0);
      t0 = Clock::now();
      const auto m = scv::encode(vol);
      const double enc_s = seconds_since(t0);
      const std::uint64_t expected = n * static_cast<std::uint64_t>(k);
      ok = ok && vol.element_count() == expected && m.height() == side;
      std::printf("%6d %8llu %5d %12zu %12llu %10.4f %10.4f %14.4f\n", side, static_cast<unsigned long long>(n), k,
                  vol.element_count(), static_cast<unsigned long long>(expected), knn_s, enc_s,
                  1e9 * knn_s / (static_cast<double>(n) * static_cast<double>(n) * channels));
    }
  }
  std::printf("element-count law h*w*k: %s\n", ok ? "holds" : "VIOLATED");
  return ok ? 0 : 2;
}

struct SynthArgs {
  int height = 64, width = 64, tx = 2, ty = 0, margin = 8;
  unsigned seed = 7;
  std::string img1, img2, gt;
};

int run_synth(const SynthArgs &a) {
  const auto img1 = scv::synthetic::textured_image(a.height, a.width, a.seed);
  const auto img2 = scv::synthetic::translate_circular(img1, a.tx, a.ty);
  // Round through 8-bit so the PNGs hold exactly what later gets read back.
  scv::io::write_png_gray(img1, a.img1);
  scv::io::write_png_gray(img2, a.img2);
  if (!a.gt.empty())
    scv::io::write_flo(scv::synthetic::translation_ground_truth(a.height, a.width, a.tx, a.ty, a.margin), a.gt);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sparse correlation volume toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  PairArgs knn_args;
  auto *knn = app.add_subcommand("knn", "Exact top-k inner-product search between two feature maps");
  add_pair_options(knn, knn_args);

  PairArgs build_args;
  int build_divisor = 1;
  auto *build = app.add_subcommand("build", "Build a sparse correlation volume (SCV1)");
  add_pair_options(build, build_args);
  build->add_option("--divisor", build_divisor, "Feature resolution divisor recorded in the volume")
      ->check(CLI::PositiveNumber);

  std::string vol_path, motion_out;
  scv::EncoderConfig enc_cfg;
  auto *enc = app.add_subcommand("encode", "Encode a sparse volume into a dense motion tensor (SMT1)");
  enc->add_option("--vol", vol_path, "Sparse volume (SCV1)")->required()->check(CLI::ExistingFile);
  enc->add_option("-r,--radius", enc_cfg.radius, "Window radius")->check(CLI::Range(1, 64));
  enc->add_option("-L,--levels", enc_cfg.levels, "Pyramid levels")->check(CLI::Range(1, 16));
  enc->add_option("--out", motion_out, "Output motion tensor")->required();

  EstimateArgs est;
  auto *estimate = app.add_subcommand("estimate", "Estimate flow between two PNG images");
  estimate->add_option("--img1", est.img1, "First image")->required()->check(CLI::ExistingFile);
  estimate->add_option("--img2", est.img2, "Second image")->required()->check(CLI::ExistingFile);
  estimate->add_option("-k", est.k, "Matches kept per pixel")->check(CLI::PositiveNumber);
  estimate->add_option("-N,--iterations", est.iterations, "Refinement iterations")->check(CLI::PositiveNumber);
  estimate->add_option("-r,--radius", est.radius, "Encoder window radius")->check(CLI::Range(1, 64));
  estimate->add_option("-L,--levels", est.levels, "Encoder pyramid levels")->check(CLI::Range(1, 16));
  estimate->add_option("--census-radius", est.census_radius, "Census patch radius")->check(CLI::Range(1, 8));
  estimate->add_option("--divisor", est.divisor, "Feature resolution divisor")->check(CLI::Range(1, 64));
  estimate->add_option("--temperature", est.temperature, "Soft-argmax temperature")->check(CLI::PositiveNumber);
  estimate->add_option("--threads", est.threads, "Worker threads (0 = all cores)");
  estimate->add_option("--out", est.out, "Output flow (.flo)")->required();
  estimate->add_option("--viz", est.viz, "Optional colour-coded flow PNG");

  std::string flow_path, gt_path, mask_path;
  auto *eval = app.add_subcommand("eval", "Print EPE and F1-all against ground truth");
  eval->add_option("--flow", flow_path, "Estimated flow (.flo)")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", gt_path, "Ground-truth flow (.flo)")->required()->check(CLI::ExistingFile);
  eval->add_option("--mask", mask_path, "Validity mask PNG (nonzero = valid)")->check(CLI::ExistingFile);

  int mr_height = 436, mr_width = 1024, mr_divisor = 4, mr_k = scv::kDefaultTopK;
  bool mr_dense = false, mr_table = false;
  auto *mem = app.add_subcommand("memory-report", "Correlation volume size and memory");
  mem->add_option("--height", mr_height, "Image height")->check(CLI::PositiveNumber);
  mem->add_option("--width", mr_width, "Image width")->check(CLI::PositiveNumber);
  mem->add_option("--divisor", mr_divisor, "Feature resolution divisor (power of two)")->check(CLI::PositiveNumber);
  mem->add_option("-k", mr_k, "Matches kept per pixel")->check(CLI::PositiveNumber);
  mem->add_flag("--dense", mr_dense, "Report the dense all-pairs volume");
  mem->add_flag("--table", mr_table, "Print dense and k=8/32/128 rows at divisors 4 and 8");

  std::vector<int> bench_sizes{16, 24, 32, 48, 64};
  std::vector<int> bench_ks{8, 32};
  int bench_channels = 32;
  unsigned bench_threads = 0;
  auto *bench = app.add_subcommand("bench", "Timing and element-count scaling of search and encode");
  bench->add_option("--sizes", bench_sizes, "Square feature map sides")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("-k", bench_ks, "k values")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("-c,--channels", bench_channels, "Descriptor channels")->check(CLI::PositiveNumber);
  bench->add_option("--threads", bench_threads, "Worker threads (0 = all cores)");

  SynthArgs synth_args;
  auto *synth = app.add_subcommand("synth", "Write a synthetic translated image pair and its ground truth");
  synth->add_option("--height", synth_args.height)->check(CLI::Range(8, 4096));
  synth->add_option("--width", synth_args.width)->check(CLI::Range(8, 4096));
  synth->add_option("--tx", synth_args.tx, "Horizontal translation (pixels)");
  synth->add_option("--ty", synth_args.ty, "Vertical translation (pixels)");
  synth->add_option("--margin", synth_args.margin, "Border excluded from the ground-truth mask")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--img1", synth_args.img1)->required();
  synth->add_option("--img2", synth_args.img2)->required();
  synth->add_option("--gt", synth_args.gt, "Ground-truth flow (.flo)");

  std::string feat_img, feat_out;
  int feat_radius = 3;
  auto *feat = app.add_subcommand("features", "Census features of a PNG image (SFM1)");
  feat->add_option("--img", feat_img)->required()->check(CLI::ExistingFile);
  feat->add_option("--census-radius", feat_radius)->check(CLI::Range(1, 8));
  feat->add_option("--out", feat_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*knn)
      return run_knn(knn_args);
    if (*build)
      return run_build(build_args, build_divisor);
    if (*enc)
      return run_encode(vol_path, enc_cfg, motion_out);
    if (*estimate)
      return run_estimate(est);
    if (*eval)
      return run_eval(flow_path, gt_path, mask_path);
    if (*mem)
      return run_memory_report(mr_height, mr_width, mr_divisor, mr_k, mr_dense, mr_table);
    if (*bench)
      return run_bench(bench_sizes, bench_ks, bench_channels, bench_threads);
    if (*synth)
      return run_synth(synth_args);
    if (*feat) {
      scv::io::write_features(scv::census_features(scv::io::read_png_gray(feat_img), feat_radius), feat_out);
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
