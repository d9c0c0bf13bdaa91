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
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trustauth/audio.hpp"
#include "trustauth/error.hpp"
#include "trustauth/synth.hpp"
#include "trustauth/wav.hpp"

namespace trustauth::audio {
namespace {

AudioBuffer Tones(std::initializer_list<double> freqs, double seconds, double noise, std::uint64_t seed) {
  AudioBuffer b;
  synth::Rng rng(seed);
  const auto n = static_cast<std::size_t>(seconds * b.sample_rate);
  b.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = noise * rng.Normal();
    for (double f : freqs) v += 0.2 * std::sin(2 * std::numbers::pi * f * static_cast<double>(i) / b.sample_rate);
    b.samples[i] = v;
  }
  return b;
}

TEST(Preemphasis, ZeroCoefficientIsIdentity) {
  const AudioBuffer b = Tones({440}, 0.1, 0.01, 1);
  EXPECT_EQ(Preemphasize(b, 0.0).samples, b.samples);
}

TEST(Preemphasis, ConstantSignalLeavesThreePercent) {
  AudioBuffer b;
  b.samples.assign(50, 0.5);
  const AudioBuffer y = Preemphasize(b, 0.97);
  EXPECT_DOUBLE_EQ(y.samples[0], 0.5);
  for (std::size_t i = 1; i < y.samples.size(); ++i) EXPECT_NEAR(y.samples[i], 0.03 * 0.5, 1e-15);
}

TEST(Preemphasis, TwoSampleFormula) {
  AudioBuffer b;
  b.samples = {1.0, 0.0};
  EXPECT_EQ(Preemphasize(b, 0.5).samples, (std::vector<double>{1.0, -0.5}));
}

TEST(Framing, OneSecondGivesNinetyEightFrames) {
  AudioBuffer b;
  b.samples.assign(16000, 0.1);
  const int expected = (16000 - 400) / 160 + 1;
  EXPECT_EQ(FrameAndWindow(b, 0.025, 0.010).rows(), expected);
  EXPECT_EQ(expected, 98);
}

TEST(Framing, ShorterThanOneFrameFails) {
  AudioBuffer b;
  b.samples.assign(399, 0.1);
  try {
    FrameAndWindow(b, 0.025, 0.010);
    FAIL() << "expected AudioTooShort";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAudioTooShort);
  }
}

TEST(Framing, AllOnesFrameIsTheHammingWindow) {
  AudioBuffer b;
  b.samples.assign(400, 1.0);
  const Eigen::MatrixXd f = FrameAndWindow(b, 0.025, 0.010);
  ASSERT_EQ(f.rows(), 1);
  for (int n = 0; n < 400; ++n) {
    const double w = 0.54 - 0.46 * std::cos(2 * std::numbers::pi * n / 399.0);
    EXPECT_NEAR(f(0, n), w, 1e-12);
  }
  EXPECT_NEAR(f(0, 199), 0.54 - 0.46 * std::cos(2 * std::numbers::pi * 199 / 399.0), 1e-12);
}

TEST(PowerSpectrum, ZeroFrameIsZero) {
  const std::vector<double> z(64, 0.0);
  EXPECT_EQ(PowerSpectrum(z, 64).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PowerSpectrum, MatchesDirectDftOnRandomFrames) {
  synth::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int len = trial % 4 == 0 ? rng.UniformInt(16, 64) : 64;
    std::vector<double> frame(static_cast<std::size_t>(len));
    for (double &v : frame) v = rng.Uniform(-1, 1);
    const Eigen::VectorXd got = PowerSpectrum(frame, 64);
    const std::vector<double> want = oracle::DirectPowerSpectrum(frame, 64);
    ASSERT_EQ(got.size(), static_cast<Eigen::Index>(want.size()));
    double scale = 0;
    for (double w : want) scale = std::max(scale, w);
    for (std::size_t k = 0; k < want.size(); ++k) {
      EXPECT_LE(std::abs(got[static_cast<Eigen::Index>(k)] - want[k]), 1e-9 * scale) << "trial " << trial << " bin " << k;
    }
  }
}

TEST(PowerSpectrum, BinExactToneHasOneDominantBin) {
  std::vector<double> frame(256);
  for (int n = 0; n < 256; ++n) frame[static_cast<std::size_t>(n)] = std::cos(2 * std::numbers::pi * 20 * n / 256.0);
  const Eigen::VectorXd p = PowerSpectrum(frame, 256);
  Eigen::Index peak = 0;
  p.maxCoeff(&peak);
  EXPECT_EQ(peak, 20);
  EXPECT_NEAR(p[20], 128.0 * 128.0, 1e-6);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (k != 20) {
      EXPECT_LT(p[k], 1e-12);
    }
  }
}

TEST(PowerSpectrum, Parseval) {
  synth::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> frame(512);
    double energy = 0;
    for (double &v : frame) {
      v = rng.Normal();
      energy += v * v;
    }
    const Eigen::VectorXd p = PowerSpectrum(frame, 512);
    const double full = p[0] + p[256] + 2 * p.segment(1, 255).sum();
    EXPECT_NEAR(full, 512 * energy, 1e-9 * 512 * energy);
  }
}

TEST(MelFilterbank, CentresMatchTheMelFormula) {
  const Eigen::VectorXd got = MelCenterFrequencies(16000, 24);
  const std::vector<double> want = oracle::MelCentres(16000, 24);
  for (int m = 0; m < 24; ++m) EXPECT_NEAR(got[m], want[static_cast<std::size_t>(m)], 1e-9);
  EXPECT_NEAR(HzToMel(1000.0), 2595.0 * std::log10(1.0 + 1000.0 / 700.0), 1e-12);
  EXPECT_NEAR(MelToHz(HzToMel(3210.0)), 3210.0, 1e-9);
}

TEST(MelFilterbank, WeightsPerBinSumToAtMostOne) {
  const Eigen::MatrixXd fb = MelFilterbank(512, 16000, 24);
  for (Eigen::Index k = 0; k < fb.cols(); ++k) EXPECT_LE(fb.col(k).sum(), 1.0 + 1e-9);
  EXPECT_GE(fb.minCoeff(), 0.0);
}

TEST(MelFilterbank, ZeroSpectrumHitsTheLogFloor) {
  const Eigen::VectorXd e = MelFilterbankEnergies(Eigen::VectorXd::Zero(257), 16000, 24);
  for (Eigen::Index m = 0; m < e.size(); ++m) EXPECT_DOUBLE_EQ(e[m], std::log(kLogFloor));
}

// A tone between two centres excites the two triangles in proportion to its
// distance from each, so the loudest filter is the one centred nearest.
TEST(MelFilterbank, ToneArgmaxIsTheNearestCentre) {
  const int n_fft = 4096, sr = 16000, n_mels = 24;
  const std::vector<double> centres = oracle::MelCentres(sr, n_mels);
  const Eigen::VectorXd window = HammingWindow(n_fft);
  for (std::size_t i = 2; i < 22; ++i) {
    const double f = i % 2 == 0 ? centres[i] + 0.3 * (centres[i + 1] - centres[i])
                                : centres[i] - 0.3 * (centres[i] - centres[i - 1]);
    std::vector<double> frame(static_cast<std::size_t>(n_fft));
    for (int n = 0; n < n_fft; ++n) frame[static_cast<std::size_t>(n)] = window[n] * std::sin(2 * std::numbers::pi * f * n / sr);
    Eigen::Index arg = 0;
    MelFilterbankEnergies(PowerSpectrum(frame, n_fft), sr, n_mels).maxCoeff(&arg);
    EXPECT_EQ(static_cast<std::size_t>(arg), oracle::NearestIndex(centres, f)) << f << " Hz";
  }
}

TEST(MelFilterbank, OneKilohertzToneLandsNearOneKilohertz) {
  const std::vector<double> centres = oracle::MelCentres(16000, 24);
  std::vector<double> frame(512);
  const Eigen::VectorXd window = HammingWindow(400);
  for (int n = 0; n < 400; ++n) frame[static_cast<std::size_t>(n)] = window[n] * std::sin(2 * std::numbers::pi * 1000.0 * n / 16000);
  Eigen::Index arg = 0;
  MelFilterbankEnergies(PowerSpectrum(frame, 512), 16000, 24).maxCoeff(&arg);
  EXPECT_EQ(static_cast<std::size_t>(arg), oracle::NearestIndex(centres, 1000.0));
}

TEST(Dct, ConstantInputOnlyFeedsCoefficientZero) {
  const Eigen::VectorXd c = Dct2(Eigen::VectorXd::Constant(24, 3.0), 19);
  EXPECT_NEAR(c[0], 3.0 * std::sqrt(24.0), 1e-12);
  for (int k = 1; k < 19; ++k) EXPECT_NEAR(c[k], 0.0, 1e-12);
}

TEST(Deltas, ConstantCepstraHaveZeroDeltas) {
  Eigen::MatrixXd c(10, 3);
  c.rowwise() = Eigen::RowVector3d(1.0, -2.0, 0.5);
  EXPECT_EQ(Deltas(c, 2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Deltas, RegressionFormulaWithEdgeReplication) {
  Eigen::MatrixXd c(6, 1);
  c << 0, 1, 4, 9, 16, 25;
  const Eigen::MatrixXd d = Deltas(c, 2);
  auto at = [&](int t) { return c(std::clamp(t, 0, 5), 0); };
  for (int t = 0; t < 6; ++t) {
    const double want = (1 * (at(t + 1) - at(t - 1)) + 2 * (at(t + 2) - at(t - 2))) / 10.0;
    EXPECT_NEAR(d(t, 0), want, 1e-12);
  }
}

TEST(Mfcc, DeterministicIncludingDigest) {
  const AudioBuffer b = Tones({300, 1200, 2500}, 0.5, 0.01, 3);
  FrontendConfig cfg;
  const MfccMatrix a = Mfcc(b, cfg), c = Mfcc(b, cfg);
  EXPECT_TRUE(a.frames == c.frames);
  EXPECT_EQ(a.config_digest, c.config_digest);
  EXPECT_EQ(a.config_digest, cfg.Digest());
  EXPECT_EQ(a.frames.cols(), 57);
  EXPECT_TRUE(a.frames.allFinite());
}

TEST(Mfcc, ScalingShiftsOnlyC0) {
  const AudioBuffer b = Tones({250, 900, 3100, 5200}, 0.5, 0.02, 4);
  FrontendConfig cfg;
  cfg.delta_order = 0;
  for (double alpha : {0.5, 2.0, 3.0}) {
    AudioBuffer s = b;
    for (double &v : s.samples) v *= alpha;
    const MfccMatrix m0 = Mfcc(b, cfg), m1 = Mfcc(s, cfg);
    const double shift = 2 * std::log(alpha) * std::sqrt(static_cast<double>(cfg.n_mels));
    for (Eigen::Index t = 0; t < m0.frames.rows(); ++t) {
      EXPECT_NEAR(m1.frames(t, 0) - m0.frames(t, 0), shift, 1e-8);
      for (int k = 1; k < cfg.n_ceps; ++k) EXPECT_NEAR(m1.frames(t, k), m0.frames(t, k), 1e-8);
    }
  }
}

TEST(Mfcc, JsonRoundTrip) {
  const MfccMatrix m = Mfcc(Tones({700}, 0.2, 0.01, 9), FrontendConfig{});
  const MfccMatrix back = MfccFromJson(MfccToJson(m));
  EXPECT_TRUE(back.frames == m.frames);
  EXPECT_EQ(back.config_digest, m.config_digest);
}

TEST(Frontend, ConfigValidation) {
  FrontendConfig cfg;
  cfg.n_ceps = 30;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = FrontendConfig{};
  cfg.preemphasis = 1.0;
  EXPECT_THROW(cfg.Validate(), Error);
  FrontendConfig other;
  other.n_mels = 26;
  EXPECT_NE(other.Digest(), FrontendConfig{}.Digest());
}

TEST(Vad, PureSilenceIsAllSilent) {
  AudioBuffer b;
  b.samples.assign(8000, 0.0);
  try {
    VoiceActivityMask(b, FrontendConfig{});
    FAIL() << "expected AllSilent";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllSilent);
  }
}

TEST(Vad, ToneBurstKeepsOnlyBurstFrames) {
  AudioBuffer b = Tones({}, 1.0, 1e-3, 8);
  for (int i = 4800; i < 11200; ++i) b.samples[static_cast<std::size_t>(i)] += 0.5 * std::sin(2 * std::numbers::pi * 800.0 * i / 16000);
  FrontendConfig cfg;
  const std::vector<bool> mask = VoiceActivityMask(b, cfg);

  // Energy oracle: mean square per raw frame, nearest-rank quantile in dB.
  const int frame = 400, step = 160;
  std::vector<double> db;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    double e = 0;
    for (int i = 0; i < frame; ++i) e += b.samples[t * step + static_cast<std::size_t>(i)] * b.samples[t * step + static_cast<std::size_t>(i)];
    db.push_back(10 * std::log10(e / frame + 1e-20));
  }
  std::vector<double> sorted = db;
  std::sort(sorted.begin(), sorted.end());
  const double thr = sorted[static_cast<std::size_t>(std::floor(0.1 * (sorted.size() - 1)))] + cfg.vad_offset_db;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    EXPECT_EQ(mask[t], db[t] > thr) << "frame " << t;
    const std::size_t lo = t * step, hi = lo + frame;
    if (lo >= 4800 && hi <= 11200) {
      EXPECT_TRUE(mask[t]) << "burst frame " << t;
    }
    if (hi <= 4800 || lo >= 11200) {
      EXPECT_FALSE(mask[t]) << "silent frame " << t;
    }
  }
}

TEST(Vad, EqualEnergyKeepsEverything) {
  AudioBuffer b;
  b.samples.resize(16000);
  for (std::size_t i = 0; i < b.samples.size(); ++i) b.samples[i] = (i / 8) % 2 == 0 ? 0.5 : -0.5;
  const std::vector<bool> mask = VoiceActivityMask(b, FrontendConfig{});
  for (bool m : mask) EXPECT_TRUE(m);
}

TEST(Wav, RoundTripWithinQuantisation) {
  const AudioBuffer b = Tones({440, 1000}, 0.25, 0.05, 2);
  const AudioBuffer back = DecodeWav(EncodeWav(b));
  ASSERT_EQ(back.samples.size(), b.samples.size());
  EXPECT_EQ(back.sample_rate, b.sample_rate);
  for (std::size_t i = 0; i < b.samples.size(); ++i) EXPECT_NEAR(back.samples[i], b.samples[i], 0.5 / 32768);
  EXPECT_EQ(EncodeWav(back), EncodeWav(b));
}

TEST(Wav, RejectsGarbage) {
  const Bytes junk = ToBytes("RIFF....WAVEnope");
  EXPECT_THROW(DecodeWav(junk), Error);
}

}  // namespace
}  // namespace trustauth::audio
