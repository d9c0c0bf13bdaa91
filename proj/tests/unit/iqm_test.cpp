// Copyright 2026 The trustauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trustauth/error.hpp"
#include "trustauth/iqm.hpp"
#include "trustauth/synth.hpp"

namespace trustauth::pad {
namespace {

using image::FrameImage;

oracle::Grid ToGrid(const Eigen::MatrixXd &m) {
  return oracle::ToGrid(static_cast<int>(m.rows()), static_cast<int>(m.cols()), [&](int r, int c) { return m(r, c); });
}

// Structured content so the edge and corner measures are exercised.
FrameImage Textured(std::uint64_t seed, int h, int w) {
  synth::Rng rng(seed);
  FrameImage img;
  img.pixels.resize(h, w);
  const double fx = rng.Uniform(0.1, 0.6), fy = rng.Uniform(0.1, 0.6);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double v = 128 + 60 * std::sin(fx * c) * std::cos(fy * r) + rng.Normal(0, 8);
      if (r > h / 3 && r < h / 2 && c > w / 4 && c < w / 2) v += 70;
      img.pixels(r, c) = std::clamp(v, 0.0, 255.0);
    }
  }
  return img;
}

void ExpectMatchesOracle(const FrameImage &img, const FrameImage &ref) {
  const IqmVector got = ComputeIqms(img, ref);
  const std::vector<double> want = oracle::Iqms(ToGrid(img.pixels), ToGrid(ref.pixels));
  ASSERT_EQ(want.size(), static_cast<std::size_t>(kNumIqms));
  for (int m = 0; m < kNumIqms; ++m) {
    const double tol = 1e-9 * std::max(1.0, std::abs(want[static_cast<std::size_t>(m)]));
    EXPECT_NEAR(got[static_cast<std::size_t>(m)], want[static_cast<std::size_t>(m)], tol) << IqmNames()[static_cast<std::size_t>(m)];
  }
}

TEST(Iqm, NamesAreFixed) {
  EXPECT_EQ(IqmNames().size(), 18u);
  EXPECT_EQ(IqmNames()[0], "MSE");
  EXPECT_EQ(IqmNames()[11], "SSIM_GLOBAL");
  EXPECT_EQ(IqmNames()[17], "GRAD_MAG_ERR");
}

TEST(Iqm, MatchesPerFormulaOracleAgainstLowpassReference) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const FrameImage img = Textured(seed, 20 + static_cast<int>(seed), 24);
    ExpectMatchesOracle(img, LowpassReference(img, 0.5 + 0.25 * static_cast<double>(seed % 4)));
  }
}

TEST(Iqm, MatchesPerFormulaOracleOnUnrelatedPairs) {
  for (std::uint64_t seed = 20; seed < 26; ++seed) ExpectMatchesOracle(Textured(seed, 22, 18), Textured(seed + 100, 22, 18));
}

TEST(Iqm, IdenticalImagesGiveTheIdentityVector) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FrameImage img = Textured(seed, 24, 24);
    const IqmVector v = ComputeIqms(img, img);
    EXPECT_EQ(Get(v, Iqm::kMse), 0.0);
    EXPECT_EQ(Get(v, Iqm::kPsnr), kPsnrCap);
    EXPECT_EQ(Get(v, Iqm::kMaxDiff), 0.0);
    EXPECT_EQ(Get(v, Iqm::kAvgDiff), 0.0);
    EXPECT_EQ(Get(v, Iqm::kNae), 0.0);
    EXPECT_NEAR(Get(v, Iqm::kStructContent), 1.0, 1e-15);
    EXPECT_NEAR(Get(v, Iqm::kNxcorr), 1.0, 1e-15);
    EXPECT_EQ(Get(v, Iqm::kLmse), 0.0);
    EXPECT_NEAR(Get(v, Iqm::kSsimGlobal), 1.0, 1e-12);
    EXPECT_NEAR(Get(v, Iqm::kMeanAngle), 1.0, 1e-7);
    EXPECT_EQ(Get(v, Iqm::kTotalEdgeDiff), 0.0);
    EXPECT_EQ(Get(v, Iqm::kTotalCornerDiff), 0.0);
    EXPECT_EQ(Get(v, Iqm::kSpectralMagErr), 0.0);
    EXPECT_EQ(Get(v, Iqm::kGradMagErr), 0.0);
    for (double x : v) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(Iqm, ZeroAgainstOnes) {
  FrameImage zero, one;
  zero.pixels = Eigen::MatrixXd::Zero(16, 16);
  one.pixels = Eigen::MatrixXd::Ones(16, 16);
  const IqmVector v = ComputeIqms(zero, one);
  EXPECT_EQ(Get(v, Iqm::kMse), 1.0);
  EXPECT_EQ(Get(v, Iqm::kMaxDiff), 1.0);
  EXPECT_EQ(Get(v, Iqm::kAvgDiff), -1.0);
  EXPECT_NEAR(Get(v, Iqm::kPsnr), 10 * std::log10(255.0 * 255.0), 1e-12);
  for (double x : v) EXPECT_TRUE(std::isfinite(x));
}

TEST(Iqm, DimensionMismatch) {
  try {
    ComputeIqms(Textured(1, 20, 20), Textured(1, 20, 21));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Iqm, SobelAndHarrisBuildingBlocks) {
  const FrameImage img = Textured(3, 26, 30);
  const Eigen::MatrixXd mag = SobelMagnitude(img.pixels);
  const oracle::Grid gx = oracle::SobelX(ToGrid(img.pixels)), gy = oracle::SobelY(ToGrid(img.pixels));
  for (int r = 0; r < mag.rows(); ++r)
    for (int c = 0; c < mag.cols(); ++c) EXPECT_NEAR(mag(r, c), std::hypot(gx[r][c], gy[r][c]), 1e-9);
  const oracle::Grid h = oracle::Harris(ToGrid(img.pixels));
  double mx = -1e300;
  for (const auto &row : h)
    for (double v : row) mx = std::max(mx, v);
  EXPECT_NEAR(HarrisMaxResponse(img.pixels), mx, 1e-9 * std::abs(mx));
  EXPECT_EQ(HarrisCornerCount(img.pixels, 0.01 * mx), oracle::CountCorners(h, 0.01 * mx));
}

TEST(Lowpass, ConstantStaysConstantAndTinySigmaIsNearIdentity) {
  FrameImage flat;
  flat.pixels = Eigen::MatrixXd::Constant(18, 18, 42.0);
  EXPECT_LT((LowpassReference(flat).pixels - flat.pixels).cwiseAbs().maxCoeff(), 1e-9);
  const FrameImage img = Textured(9, 20, 20);
  EXPECT_LE((LowpassReference(img, 0.01).pixels - img.pixels).cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace
}  // namespace trustauth::pad
