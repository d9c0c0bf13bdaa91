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

#ifndef TRUSTAUTH_AUDIO_HPP_
#define TRUSTAUTH_AUDIO_HPP_

// Deterministic MFCC front-end shared by the speaker verifier and the voice
// PAD instrument. All functions are pure.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trustauth/types.hpp"

namespace trustauth::audio {

struct AudioBuffer {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 16000;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  void Validate() const;
};

struct FrontendConfig {
  int sample_rate = 16000;
  double preemphasis = 0.97;
  double frame_len = 0.025;
  double frame_step = 0.010;
  int n_fft = 0;  // 0 selects the next power of two >= frame samples
  int n_mels = 24;
  int n_ceps = 19;
  // 0: static cepstra only, 1: + deltas, 2: + deltas and delta-deltas.
  int delta_order = 2;
  int delta_window = 2;
  double vad_energy_quantile = 0.1;
  double vad_offset_db = 6.0;

  void Validate() const;
  int FrameSamples() const;
  int StepSamples() const;
  int FftSize() const;
  int FeatureDim() const { return n_ceps * (delta_order + 1); }
  // Lowercase hex SHA-256 of the canonical JSON form.
  std::string Digest() const;
};

void to_json(Json &j, const FrontendConfig &c);
void from_json(const Json &j, FrontendConfig &c);

struct MfccMatrix {
  Eigen::MatrixXd frames;  // T x D
  double frame_step = 0.0;
  std::string config_digest;
};

Json MfccToJson(const MfccMatrix &m);
MfccMatrix MfccFromJson(const Json &j);

inline constexpr double kLogFloor = 1e-10;
inline constexpr double kSilenceFloor = 1e-8;

AudioBuffer Preemphasize(const AudioBuffer &buf, double coeff);

Eigen::VectorXd HammingWindow(int n);

// One windowed frame per row; a trailing partial frame is dropped.
Eigen::MatrixXd FrameAndWindow(const AudioBuffer &buf, double frame_len, double frame_step);

// |FFT(zero-padded frame)|^2 for bins 0..n_fft/2.
Eigen::VectorXd PowerSpectrum(std::span<const double> frame, int n_fft);

double HzToMel(double hz);
double MelToHz(double mel);

// Peak-normalised triangular filters, n_mels x (n_fft/2 + 1), with centres
// equally spaced on the mel scale between 0 and Nyquist.
Eigen::MatrixXd MelFilterbank(int n_fft, int sample_rate, int n_mels);
Eigen::VectorXd MelCenterFrequencies(int sample_rate, int n_mels);

// Log filterbank energies, floored at kLogFloor. n_fft is inferred from the
// spectrum length.
Eigen::VectorXd MelFilterbankEnergies(const Eigen::VectorXd &spectrum, int sample_rate, int n_mels);

// Orthonormal DCT-II, first n_out coefficients.
Eigen::VectorXd Dct2(const Eigen::VectorXd &x, int n_out);

// Regression deltas with edge replication.
Eigen::MatrixXd Deltas(const Eigen::MatrixXd &feats, int window);

MfccMatrix Mfcc(const AudioBuffer &buf, const FrontendConfig &cfg);

// Per-frame mean-square energy of the raw (un-emphasised, un-windowed) frames.
std::vector<double> FrameEnergies(const AudioBuffer &buf, const FrontendConfig &cfg);

// A frame is kept when its energy is above kSilenceFloor and its level in dB
// exceeds the vad_energy_quantile level plus vad_offset_db. When no frame
// clears that bar the signal has no usable level contrast and every frame
// above the floor is kept. Throws AllSilent if nothing is above the floor.
std::vector<bool> VoiceActivityMask(const AudioBuffer &buf, const FrontendConfig &cfg);

// Mfcc rows restricted to the voice-activity mask.
MfccMatrix VoicedMfcc(const AudioBuffer &buf, const FrontendConfig &cfg);

}  // namespace trustauth::audio

#endif  // TRUSTAUTH_AUDIO_HPP_
