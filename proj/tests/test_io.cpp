#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scv/census.hpp"
#include "scv/flow_color.hpp"
#include "scv/io/formats.hpp"
#include "scv/png_io.hpp"
#include "scv/synthetic.hpp"

namespace scv {
namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string &name) {
  return (fs::temp_directory_path() / ("scv_test_" + std::to_string(::getpid()) + "_" + name)).string();
}

TEST(Flo, FileRoundTripIsBitwise) {
  std::mt19937 rng(1);
  FlowField f(7, 5);
  std::normal_distribution<float> d(0, 20);
  for (auto &v : f.data())
    v = {d(rng), d(rng)};
  const auto path = temp_path("rt.flo");
  io::write_flo(f, path);
  const auto back = io::read_flo(path);
  EXPECT_EQ(back, f);
  EXPECT_EQ(fs::file_size(path), 12u + 8u * 35u);
  fs::remove(path);
}

TEST(Flo, SinglePixelFileSize) {
  const auto bytes = io::encode_flo(FlowField(1, 1));
  EXPECT_EQ(bytes.size(), 20u); // 12-byte header + one (u, v) pair
  // Tag "PIEH" in ASCII when written little-endian.
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PIEH");
}

TEST(Flo, RejectsMalformed) {
  auto bytes = io::encode_flo(FlowField(2, 2, FlowVec{1, 2}));
  auto bad_tag = bytes;
  bad_tag[0] ^= 0x01;
  EXPECT_THROW(io::decode_flo(bad_tag), FormatError);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(io::decode_flo(truncated), FormatError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(io::decode_flo(trailing), FormatError);
  auto huge = bytes;
  huge[4] = huge[5] = huge[6] = 0xff;
  huge[7] = 0x7f;
  EXPECT_THROW(io::decode_flo(huge), FormatError);
  EXPECT_THROW(io::decode_flo({}), FormatError);
  EXPECT_THROW(io::read_flo(temp_path("does_not_exist.flo")), FormatError);
}

TEST(Flo, UnknownFlowBecomesMask) {
  FlowField f(1, 3, FlowVec{1, 1});
  f.set_mask({1, 0, 1});
  const auto back = io::decode_flo(io::encode_flo(f));
  ASSERT_TRUE(back.has_mask());
  EXPECT_TRUE(back.valid(0, 0));
  EXPECT_FALSE(back.valid(0, 1));
  EXPECT_EQ(back(0, 2), (FlowVec{1, 1}));
}

TEST(Formats, RoundTripsAreLossless) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto feat = testing::random_features(rng, 1 + trial % 5, 2 + trial % 3, 1 + trial % 7);
    EXPECT_EQ(io::decode_features(io::encode_features(feat)), feat);

    const auto vol = testing::random_volume(rng, 1 + trial % 4, 1 + trial % 6, trial % 5, 9.0f, trial % 2);
    EXPECT_EQ(io::decode_volume(io::encode_volume(vol)), vol);
    EXPECT_EQ(io::encode_volume(io::decode_volume(io::encode_volume(vol))), io::encode_volume(vol));

    const EncoderConfig cfg{1 + trial % 5, 1 + trial % 3};
    const auto m = encode(vol, cfg);
    EXPECT_EQ(io::decode_motion(io::encode_motion(m)), m);

    if (vol.k() > 0 && feat.pixel_count() >= 2) {
      const auto matches = topk_search(feat, feat, 2);
      EXPECT_EQ(io::decode_matches(io::encode_matches(matches)), matches);
    }
  }
}

TEST(Formats, HeaderLayout) {
  const SparseCorrelationVolume v(2, 3, 1, 4, std::vector<SparseEntry>(6, SparseEntry{1, -1, 0.5f}));
  const auto bytes = io::encode_volume(v);
  ASSERT_EQ(bytes.size(), 20u + 6u * 12u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SCV1");
  EXPECT_EQ(bytes[4], 2);  // h, little-endian
  EXPECT_EQ(bytes[8], 3);  // w
  EXPECT_EQ(bytes[12], 1); // k
  EXPECT_EQ(bytes[16], 4); // divisor

  const auto motion = io::encode_motion(encode(v, {2, 1}));
  EXPECT_EQ(std::string(motion.begin(), motion.begin() + 4), "SMT1");
  EXPECT_EQ(motion.size(), 20u + 4u * 6u * 18u);
}

TEST(Formats, RejectMalformedHeaders) {
  const auto good = io::encode_features(FeatureMap(2, 2, 2));
  auto magic = good;
  magic[3] = '2';
  EXPECT_THROW(io::decode_features(magic), FormatError);
  auto zero_dim = good;
  zero_dim[4] = 0;
  EXPECT_THROW(io::decode_features(zero_dim), FormatError);
  auto nan = good;
  const float q = NAN;
  std::memcpy(nan.data() + 16, &q, 4);
  EXPECT_THROW(io::decode_features(nan), FormatError);

  auto smt = io::encode_motion(MotionTensor(1, 1, {1, 1}));
  smt[16] = 0; // radius 0
  EXPECT_THROW(io::decode_motion(smt), FormatError);
}

TEST(Formats, MatchesRejectOutOfRangeIndex) {
  std::mt19937 rng(3);
  const auto f = testing::random_features(rng, 2, 2, 3);
  auto bytes = io::encode_matches(topk_search(f, f, 1));
  bytes[24] = 9; // first target index -> 9 >= 4
  EXPECT_THROW(io::decode_matches(bytes), FormatError);
}

TEST(Formats, RandomBytesNeverCrash) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 96);
  int rejected = 0;
  for (int i = 0; i < 500; ++i) {
    io::Bytes b(static_cast<std::size_t>(len(rng)));
    for (auto &x : b)
      x = static_cast<unsigned char>(byte(rng));
    try {
      io::decode_flo(b);
    } catch (const FormatError &) {
      ++rejected;
    }
    try {
      io::decode_volume(b);
    } catch (const FormatError &) {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 900);
}

// ---------------------------------------------------------------------------

TEST(Census, ConstantImageGivesZeroDescriptors) {
  const ScalarGrid img(7, 8, 42.0f);
  const auto f = census_features(img, 2);
  EXPECT_EQ(f.channels(), 24);
  for (float v : f.data())
    EXPECT_EQ(v, 0.0f);
}

TEST(Census, StepEdgeDistinguishesSides) {
  ScalarGrid img(9, 10);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 10; ++x)
      img(y, x) = x < 5 ? 10.0f : 200.0f;
  const auto f = census_features(img, 1);
  const auto left = f.descriptor(4, 4);
  const auto right = f.descriptor(4, 5);
  EXPECT_NE(std::vector<float>(left.begin(), left.end()), std::vector<float>(right.begin(), right.end()));
  // Left of the edge: right-hand neighbours are brighter.
  EXPECT_EQ(left[2], 1.0f);
  EXPECT_EQ(right[0], -1.0f);
}

TEST(Census, TranslationEquivariantInInterior) {
  const auto img = synthetic::textured_image(20, 24, 5);
  const int tx = 3, ty = -2, p = 2;
  const auto moved = synthetic::translate_circular(img, tx, ty);
  const auto a = census_features(img, p);
  const auto b = census_features(moved, p);
  for (int y = p; y < 20 - p; ++y)
    for (int x = p; x < 24 - p; ++x) {
      const int y2 = y + ty, x2 = x + tx;
      if (y2 < p || y2 >= 20 - p || x2 < p || x2 >= 24 - p)
        continue;
      const auto da = a.descriptor(y, x);
      const auto db = b.descriptor(y2, x2);
      EXPECT_TRUE(std::equal(da.begin(), da.end(), db.begin()));
    }
}

TEST(Census, BorderNeighboursAreZeroAndTooSmallRejected) {
  const auto img = synthetic::textured_image(5, 5, 1);
  const auto f = census_features(img, 1);
  // Pixel (0,0): the first four neighbours (row -1 and (0,-1)) are outside.
  for (int ch = 0; ch < 4; ++ch)
    EXPECT_EQ(f.descriptor(0, 0)[ch], 0.0f);
  EXPECT_THROW(census_features(img, 3), InvalidArgument);
}

// ---------------------------------------------------------------------------

TEST(FlowColor, ZeroFieldIsWhite) {
  const auto img = flow_to_color(FlowField(3, 4));
  for (auto c : img.rgb)
    EXPECT_EQ(c, 255);
}

TEST(FlowColor, AntipodalVectorsAreComplementary) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<float> ang(0, 6.2831853f), mag(0.5f, 4.0f);
  for (int i = 0; i < 100; ++i) {
    const float a = ang(rng), m = mag(rng);
    FlowField f(1, 2);
    f(0, 0) = {m * std::cos(a), m * std::sin(a)};
    f(0, 1) = {-m * std::cos(a), -m * std::sin(a)};
    const auto img = flow_to_color(f, 4.0);
    const double sat = m / 4.0;
    // Complementary hues on an HSV wheel: channels sum to (2 - s) * 255.
    for (int c = 0; c < 3; ++c)
      EXPECT_NEAR(img.pixel(0, 0)[c] + img.pixel(0, 1)[c], (2.0 - sat) * 255.0, 1.01);
  }
}

TEST(FlowColor, JointScalingLeavesImageUnchanged) {
  std::mt19937 rng(7);
  const auto f = testing::random_quarter_flow(rng, 6, 6, 5);
  const auto base = flow_to_color(f, 5.0);
  for (float s : {0.5f, 2.0f, 8.0f}) {
    FlowField g = f;
    for (auto &v : g.data())
      v = v * s;
    EXPECT_EQ(flow_to_color(g, 5.0 * s), base);
  }
  EXPECT_EQ(flow_to_color(f), flow_to_color(f, max_flow_magnitude(f)));
}

TEST(FlowColor, InvalidPixelsAreBlack) {
  FlowField f(1, 2, FlowVec{1, 0});
  f.set_mask({0, 1});
  const auto img = flow_to_color(f);
  EXPECT_EQ(img.pixel(0, 0)[0] + img.pixel(0, 0)[1] + img.pixel(0, 0)[2], 0);
  // Pure +x at full saturation is red.
  EXPECT_EQ(img.pixel(0, 1)[0], 255);
  EXPECT_EQ(img.pixel(0, 1)[1], 0);
  EXPECT_EQ(img.pixel(0, 1)[2], 0);
}

TEST(Png, GrayRoundTrip) {
  ScalarGrid img(5, 7);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x)
      img(y, x) = static_cast<float>((y * 7 + x) * 7 % 256);
  const auto path = temp_path("gray.png");
  io::write_png_gray(img, path);
  EXPECT_EQ(io::read_png_gray(path), img);
  fs::remove(path);
  EXPECT_THROW(io::read_png_gray(path), FormatError);
}

} // namespace
} // namespace scv
