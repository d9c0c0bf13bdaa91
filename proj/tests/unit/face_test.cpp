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

#include <algorithm>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scratch.hpp"
#include "trustauth/error.hpp"
#include "trustauth/face.hpp"
#include "trustauth/synth.hpp"

namespace trustauth::face {
namespace {

FrameImage Noise(std::uint64_t seed, int h = 32, int w = 32) {
  synth::Rng rng(seed);
  FrameImage img;
  img.pixels.resize(h, w);
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i) img.pixels(i) = rng.Uniform(0, 255);
  return img;
}

FaceEmbedding Unit(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return {x.normalized(), "test"};
}

TEST(ToyEmbed, ConstantImageFallsBackToFirstBasisVector) {
  FrameImage img;
  img.pixels = Eigen::MatrixXd::Constant(24, 24, 90);
  const FaceEmbedding e = ToyEmbed(img);
  ASSERT_EQ(e.v.size(), 256);
  EXPECT_EQ(e.v[0], 1.0);
  EXPECT_EQ(e.v.tail(255).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ToyEmbed, UnitNormAndOffsetInvariance) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const FrameImage img = Noise(seed, 16 + static_cast<int>(seed), 40);
    const FaceEmbedding e = ToyEmbed(img);
    EXPECT_NEAR(e.v.norm(), 1.0, 1e-9);
    EXPECT_EQ(e.extractor_id, ToyExtractor::kId);
    FrameImage brighter = img;
    brighter.pixels.array() += 10.0;
    EXPECT_LT((ToyEmbed(brighter).v - e.v).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ToyEmbed, SixteenSquareInputIsOnlyCentredAndScaled) {
  const FrameImage img = Noise(3, 16, 16);
  Eigen::VectorXd want(256);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) want[r * 16 + c] = img.pixels(r, c);
  want.array() -= want.mean();
  want.normalize();
  const Eigen::VectorXd got = ToyEmbed(img).v;
  // Row-major or column-major flattening; either is a fixed permutation.
  Eigen::VectorXd sorted_got = got, sorted_want = want;
  std::sort(sorted_got.data(), sorted_got.data() + 256);
  std::sort(sorted_want.data(), sorted_want.data() + 256);
  EXPECT_LT((sorted_got - sorted_want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Enrollment, SevenSecondsAtTenFps) {
  FrameSequence seq;
  seq.fps = 10;
  for (int i = 0; i < 70; ++i) seq.frames.push_back(Noise(static_cast<std::uint64_t>(i)));
  EXPECT_EQ(EffectiveStride(10, FaceOptions{}), 5);
  const auto embeddings = EmbedEnrollment(seq, ToyExtractor{});
  EXPECT_EQ(embeddings.size(), 14u);
  EXPECT_EQ((embeddings[1].v - ToyEmbed(seq.frames[5]).v).norm(), 0.0);
}

TEST(Enrollment, OneSecondIsTooShort) {
  FrameSequence seq;
  seq.fps = 10;
  for (int i = 0; i < 10; ++i) seq.frames.push_back(Noise(1));
  try {
    EmbedEnrollment(seq, ToyExtractor{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewFrames);
  }
}

TEST(Enrollment, DuplicateFramesGiveDuplicateEmbeddings) {
  FrameSequence seq;
  seq.fps = 2;
  for (int i = 0; i < 12; ++i) seq.frames.push_back(Noise(9));
  const auto e = EmbedEnrollment(seq, ToyExtractor{});
  for (const auto &x : e) EXPECT_EQ(x.v, e.front().v);
}

TEST(Enrollment, StoredThroughTheRegistry) {
  testing_support::ScratchDir dir("face");
  registry::Registry store(dir.path());
  const auto id = store.RegisterLearner("f").id;
  const auto profile = synth::RandomFace(4);
  const auto video = synth::SynthFaceVideo(profile, 5.0, 10.0, 1);
  const auto templates = EnrollFace(store, id, ToyExtractor{}, video, "s1", Now());
  EXPECT_EQ(templates.size(), 10u);
  const auto probe = synth::SynthFaceVideo(profile, 1.0, 10.0, 2);
  const auto o = VerifyFace(store, id, ToyExtractor{}, probe.frames, 0.6);
  EXPECT_TRUE(o.accepted);
  EXPECT_EQ(o.item_scores.size(), 10u);
  try {
    EnrollFace(store, id, ToyExtractor{}, video, "s1", Now());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadyEnrolled);
  }
}

TEST(ScoreFace, IdenticalFramesScoreOne) {
  std::vector<FaceEmbedding> enrolled;
  for (std::uint64_t s = 0; s < 4; ++s) enrolled.push_back(ToyEmbed(Noise(s)));
  const auto o = ScoreFace(enrolled, enrolled, 0.99);
  EXPECT_EQ(o.score, 1.0);
  EXPECT_TRUE(o.accepted);
  for (double s : o.item_scores) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(ScoreFace, OrthogonalProbesAreRejected) {
  const std::vector<FaceEmbedding> enrolled{Unit({1, 0, 0}), Unit({0, 1, 0})};
  const std::vector<FaceEmbedding> probe{Unit({0, 0, 1}), Unit({0, 0, -1})};
  const auto o = ScoreFace(enrolled, probe, 0.5);
  EXPECT_EQ(o.score, 0.0);
  EXPECT_FALSE(o.accepted);
}

TEST(ScoreFace, ExactlyHalfValidIsAccepted) {
  const std::vector<FaceEmbedding> enrolled{Unit({1, 0, 0})};
  const std::vector<FaceEmbedding> probe{Unit({1, 0, 0}), Unit({0, 1, 0}), Unit({1, 0.1, 0}), Unit({0, 0, 1})};
  const auto o = ScoreFace(enrolled, probe, 0.5);
  EXPECT_EQ(o.score, 0.5);
  EXPECT_TRUE(o.accepted);
}

TEST(ScoreFace, MonotoneInThresholdAndPermutationFree) {
  std::vector<FaceEmbedding> enrolled, probe;
  const auto profile = synth::RandomFace(7);
  for (std::uint64_t s = 0; s < 6; ++s) enrolled.push_back(ToyEmbed(synth::SynthFace(profile, s)));
  for (std::uint64_t s = 0; s < 8; ++s) probe.push_back(ToyEmbed(synth::SynthFace(s % 2 ? profile : synth::RandomFace(s), 100 + s)));
  double previous = 2.0;
  for (double t = -1; t <= 1.0; t += 0.02) {
    const double frac = ScoreFace(enrolled, probe, t).score;
    EXPECT_LE(frac, previous);
    previous = frac;
    auto shuffled = enrolled;
    std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
    EXPECT_EQ(ScoreFace(shuffled, probe, t).item_scores, ScoreFace(enrolled, probe, t).item_scores);
  }
}

TEST(ScoreFace, DimensionMismatchAndEmptyInputs) {
  const std::vector<FaceEmbedding> enrolled{Unit({1, 0, 0})};
  const std::vector<FaceEmbedding> probe{Unit({1, 0})};
  try {
    ScoreFace(enrolled, probe, 0.5);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  try {
    ScoreFace(enrolled, {}, 0.5);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyProbe);
  }
}

TEST(Image, PgmRoundTrip) {
  FrameImage img = Noise(5, 20, 33);
  img.pixels = img.pixels.array().round();
  const FrameImage back = image::DecodePgm(image::EncodePgm(img));
  EXPECT_TRUE(back.pixels == img.pixels);
  EXPECT_THROW(image::DecodePgm(ToBytes("P6\n2 2\n255\n1234")), Error);
}

TEST(Image, SmallFramesAreRejected) {
  FrameImage img;
  img.pixels = Eigen::MatrixXd::Zero(15, 40);
  EXPECT_THROW(img.Validate(), Error);
}

TEST(Image, FrameSequenceRoundTrip) {
  FrameSequence seq;
  seq.fps = 12.5;
  for (std::uint64_t s = 0; s < 3; ++s) {
    FrameImage f = Noise(s);
    f.pixels = f.pixels.array().round();
    seq.frames.push_back(f);
  }
  const FrameSequence back = image::DecodeFrameSequence(image::EncodeFrameSequence(seq));
  EXPECT_EQ(back.fps, 12.5);
  ASSERT_EQ(back.frames.size(), 3u);
  EXPECT_TRUE(back.frames[2].pixels == seq.frames[2].pixels);
}

TEST(Image, BlurOfAnImpulseIsTheGaussian) {
  for (double sigma : {0.5, 1.0, 1.5}) {
    Eigen::MatrixXd img = Eigen::MatrixXd::Zero(31, 31);
    img(15, 15) = 1.0;
    const Eigen::MatrixXd out = image::GaussianBlur(img, sigma);
    const oracle::Grid k = oracle::GaussianKernel2d(sigma);
    const int rad = static_cast<int>(k.size() / 2);
    for (int r = 0; r < 31; ++r) {
      for (int c = 0; c < 31; ++c) {
        const int dy = r - 15, dx = c - 15;
        const double want = std::abs(dy) <= rad && std::abs(dx) <= rad ? k[static_cast<std::size_t>(dy + rad)][static_cast<std::size_t>(dx + rad)] : 0.0;
        EXPECT_NEAR(out(r, c), want, 1e-6);
      }
    }
  }
}

TEST(Image, BlurKeepsConstantsAndTinySigmaIsNearIdentity) {
  const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(20, 20, 77.0);
  EXPECT_LT((image::GaussianBlur(flat, 2.0) - flat).cwiseAbs().maxCoeff(), 1e-9);
  const FrameImage img = Noise(8);
  EXPECT_LT((image::GaussianBlur(img.pixels, 0.01) - img.pixels).cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace
}  // namespace trustauth::face
