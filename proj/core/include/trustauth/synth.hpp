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

#ifndef TRUSTAUTH_SYNTH_HPP_
#define TRUSTAUTH_SYNTH_HPP_

// Seeded generators for synthetic speakers, faces and typists, plus the
// replay and recapture channels used to build presentation attacks.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trustauth/audio.hpp"
#include "trustauth/image.hpp"
#include "trustauth/keystroke.hpp"

namespace trustauth::synth {

// splitmix64 finaliser; DeriveSeed mixes a root seed with stream indices so
// every trial gets an independent, reproducible generator.
std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Portable generator: the same seed yields the same stream on every
// platform, unlike the standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t Next();
  double Uniform();  // [0, 1)
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  int UniformInt(int lo, int hi);  // inclusive
  double Normal();                 // Box-Muller
  double Normal(double mean, double std) { return mean + std * Normal(); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---- voice ----

struct SpectralPeak {
  double freq_hz = 0.0;
  double bandwidth_hz = 0.0;
  double gain = 1.0;
};

struct SyntheticSpeakerProfile {
  std::uint64_t seed = 0;
  std::vector<SpectralPeak> peaks;  // 3 to 5
  double pitch_hz = 120.0;
  double syllable_rate_hz = 4.0;
  double envelope_depth = 0.7;
  // Centre and bandwidth of the unvoiced (fricative) noise bursts.
  double fricative_hz = 5000.0;
  double fricative_bandwidth_hz = 2000.0;
  int sample_rate = 16000;

  void Validate() const;
};

// Random profile with 3 to 5 formant-like peaks, one per frequency slot
// (250-900, 900-2400, 2400-3400, 3400-4800, 4800-7000 Hz).
SyntheticSpeakerProfile RandomSpeaker(std::uint64_t seed, int sample_rate = 16000);

// `count` profiles whose peak sets are pairwise disjoint: each slot is cut
// into `count` mel-spaced cells dealt out at random, one per speaker.
std::vector<SyntheticSpeakerProfile> DisjointSpeakers(int count, std::uint64_t seed, int sample_rate = 16000);

// Levels are RMS ratios relative to the voiced (pulse-train) component; with
// voiced_level 0 they are relative to the tones instead.
struct VoiceOptions {
  double voiced_level = 1.0;      // glottal pulse train through the peak resonators
  double glottal_direct = 0.3;    // unfiltered low-passed source mixed into the voiced part
  double tone_level = 0.5;        // sinusoids at the jittered peak frequencies
  double noise_level = 0.15;      // resonator-shaped noise
  double fricative_level = 0.3;   // unvoiced bursts between syllables
  double fricative_rate = 0.5;    // probability of a burst before a syllable
  double pause_seconds = 0.35;    // mean pause after every 3 to 6 syllables
  double floor_level = 3e-3;      // white broadband floor
  double envelope_depth = -1.0;   // < 0 uses the profile's value
  double freq_jitter = 0.01;      // relative per-utterance peak jitter
  double timbre_variation = 0.6;  // per-syllable peak weights drawn from [1 - v, 1]
  double amplitude = 0.3;         // peak amplitude of the result
};

// Pure tones at the profile's peaks: no pulse train, noise or envelope.
VoiceOptions PureToneOptions();

// Source-filter synthesis. InvalidArgument when duration_s < 1.
audio::AudioBuffer SynthVoice(const SyntheticSpeakerProfile &profile, double duration_s,
                              std::uint64_t utterance_seed, const VoiceOptions &options = {});

// Windowed-sinc band-pass FIR (Hamming window).
std::vector<double> BandpassTaps(double low_hz, double high_hz, int sample_rate, int num_taps);

struct ReplayOptions {
  double low_hz = 300.0;
  double high_hz = 3400.0;
  int num_taps = 257;
  double snr_db = 20.0;
  double clip = 0.9;
  std::uint64_t seed = 0;
};

// Loudspeaker-to-microphone channel: band limit, additive white noise at the
// given SNR (relative to the filtered signal), hard clipping.
audio::AudioBuffer SimulateReplayVoice(const audio::AudioBuffer &buf, const ReplayOptions &options = {});

// ---- face ----

struct FaceBlob {
  double row = 0.0, col = 0.0;  // relative [0, 1]
  double radius = 0.1;          // relative
  double amplitude = 0.0;       // gray levels
};

struct SyntheticFaceProfile {
  std::uint64_t seed = 0;
  double base_level = 128.0;
  std::vector<FaceBlob> blobs;
  // Identity texture: smooth random field amplitude in gray levels.
  double texture_amplitude = 10.0;
  int side = 64;
};

SyntheticFaceProfile RandomFace(std::uint64_t seed, int side = 64);

struct CaptureOptions {
  double max_shift_px = 1.0;
  double gain_jitter = 0.08;
  double offset_jitter = 8.0;
  double min_noise_sigma = 0.5;
  double max_noise_sigma = 1.5;
};

image::FrameImage SynthFace(const SyntheticFaceProfile &profile, std::uint64_t capture_seed,
                            const CaptureOptions &options = {});

image::FrameSequence SynthFaceVideo(const SyntheticFaceProfile &profile, double seconds, double fps,
                                    std::uint64_t seed, const CaptureOptions &options = {});

struct RecaptureOptions {
  double blur_sigma = 1.5;
  double contrast = 0.8;  // pixels move 20% toward mid gray
  double noise_sigma = 2.0;
  std::uint64_t seed = 0;
};

// Print/screen recapture: blur, 2x down- and up-sampling (bilinear), contrast
// compression toward 128, additive Gaussian noise, clamp to [0, 255].
image::FrameImage SimulateRecaptureFace(const image::FrameImage &img, const RecaptureOptions &options = {});

// ---- keystrokes ----

struct KeyTiming {
  double mean_ms = 0.0;
  double std_ms = 0.0;
};

struct SyntheticTypistProfile {
  std::uint64_t seed = 0;
  std::vector<std::string> keys;
  std::map<std::string, KeyTiming> dwell;   // per key
  std::map<std::string, KeyTiming> flight;  // per "a|b" pair, press to press

  void Validate() const;
};

// Alphabet used by the typist generators: a-z and space.
const std::vector<std::string> &TypingKeys();

struct TypistPopulationOptions {
  double dwell_std_ms = 4.0;
  // Per key, typists' dwell means sit on a shuffled grid with this spacing
  // (in dwell standard deviations).
  double dwell_separation = 3.0;
  double dwell_base_ms = 70.0;
  double flight_base_ms = 110.0;
  double flight_spread_ms = 60.0;
  double flight_std_ms = 15.0;
};

std::vector<SyntheticTypistProfile> TypistPopulation(int count, std::uint64_t seed,
                                                     const TypistPopulationOptions &options = {});

// Gaussian timings, clipped at 1 ms, keys drawn uniformly; events sorted.
std::vector<keystroke::KeyEvent> SynthTyping(const SyntheticTypistProfile &profile, int n_keystrokes,
                                             std::uint64_t seed);

}  // namespace trustauth::synth

#endif  // TRUSTAUTH_SYNTH_HPP_
