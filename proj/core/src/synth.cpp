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

#include "trustauth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "trustauth/error.hpp"
#include "trustauth/keystroke.hpp"

namespace trustauth::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

template <typename T>
void Shuffle(std::vector<T> &v, Rng &rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.UniformInt(0, static_cast<int>(i - 1)));
    std::swap(v[i - 1], v[j]);
  }
}

double Rms(const std::vector<double> &x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

// Two-pole resonator at `freq` with -3 dB bandwidth `bandwidth`.
std::vector<double> Resonate(const std::vector<double> &x, double freq, double bandwidth, int sr) {
  const double r = std::exp(-std::numbers::pi * bandwidth / sr);
  const double a1 = 2.0 * r * std::cos(kTwoPi * freq / sr);
  const double a2 = -r * r;
  std::vector<double> y(x.size(), 0.0);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] + a1 * y1 + a2 * y2;
    y[i] = v;
    y2 = y1;
    y1 = v;
  }
  return y;
}

void NormalizeRms(std::vector<double> &x) {
  const double rms = Rms(x);
  if (rms > 0) {
    for (double &v : x) v /= rms;
  }
}

// Unit-amplitude sinusoid by complex rotation, renormalised periodically.
void AddTone(std::vector<double> &out, const std::vector<double> &gain, double freq, double phase, int sr) {
  const std::complex<double> step = std::polar(1.0, kTwoPi * freq / sr);
  std::complex<double> z = std::polar(1.0, phase);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += gain[i] * z.imag();
    z *= step;
    if ((i & 1023) == 1023) z /= std::abs(z);
  }
}

Eigen::MatrixXd TextureField(std::uint64_t seed, int side) {
  Rng rng(DeriveSeed(seed, 0x7e47));
  Eigen::MatrixXd noise(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) noise(r, c) = rng.Normal();
  Eigen::MatrixXd field = image::GaussianBlur(noise, 2.0);
  const double mean = field.mean();
  const double sd = std::sqrt((field.array() - mean).square().mean());
  return sd > 0 ? Eigen::MatrixXd((field.array() - mean) / sd) : field;
}

double SampleBilinear(const Eigen::MatrixXd &m, double r, double c) {
  r = std::clamp(r, 0.0, static_cast<double>(m.rows() - 1));
  c = std::clamp(c, 0.0, static_cast<double>(m.cols() - 1));
  const auto r0 = static_cast<Eigen::Index>(std::floor(r));
  const auto c0 = static_cast<Eigen::Index>(std::floor(c));
  const Eigen::Index r1 = std::min(r0 + 1, m.rows() - 1), c1 = std::min(c0 + 1, m.cols() - 1);
  const double fr = r - static_cast<double>(r0), fc = c - static_cast<double>(c0);
  return (1 - fr) * ((1 - fc) * m(r0, c0) + fc * m(r0, c1)) + fr * ((1 - fc) * m(r1, c0) + fc * m(r1, c1));
}

}  // namespace

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return SplitMix64(SplitMix64(SplitMix64(SplitMix64(root) ^ a) ^ b) ^ c);
}

std::uint64_t Rng::Next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

int Rng::UniformInt(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(Next() % span);
}

double Rng::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return mag * std::cos(kTwoPi * u2);
}

// ---- voice ----

void SyntheticSpeakerProfile::Validate() const {
  if (peaks.size() < 3 || peaks.size() > 5) Fail(ErrorCode::kInvalidArgument, "speaker needs 3 to 5 peaks");
  for (const auto &p : peaks) {
    if (!(p.freq_hz >= 100.0 && p.freq_hz < sample_rate / 2.0)) {
      Fail(ErrorCode::kInvalidArgument, "spectral peak outside [100, Nyquist)");
    }
    if (!(p.bandwidth_hz > 0) || !(p.gain > 0)) Fail(ErrorCode::kInvalidArgument, "bad peak shape");
  }
  if (!(pitch_hz > 0) || !(syllable_rate_hz > 0)) Fail(ErrorCode::kInvalidArgument, "bad pitch or rate");
  if (!(fricative_hz > 0 && fricative_hz < sample_rate / 2.0) || !(fricative_bandwidth_hz > 0)) {
    Fail(ErrorCode::kInvalidArgument, "fricative band outside (0, Nyquist)");
  }
}

namespace {

SyntheticSpeakerProfile SpeakerShell(std::uint64_t seed, int sample_rate, Rng &rng) {
  SyntheticSpeakerProfile p;
  p.seed = seed;
  p.sample_rate = sample_rate;
  p.pitch_hz = rng.Uniform(90.0, 220.0);
  p.syllable_rate_hz = rng.Uniform(3.0, 6.0);
  p.envelope_depth = rng.Uniform(0.3, 0.6);
  p.fricative_hz = rng.Uniform(0.25, 0.4) * sample_rate;
  p.fricative_bandwidth_hz = rng.Uniform(0.08, 0.15) * sample_rate;
  return p;
}

SpectralPeak RandomPeakShape(double freq, Rng &rng) {
  return {freq, rng.Uniform(60.0, 200.0), rng.Uniform(0.5, 1.0)};
}

}  // namespace

namespace {

// Formant-like slots; a profile with n peaks fills the first n slots.
constexpr double kSlotEdges[] = {250.0, 900.0, 2400.0, 3400.0, 4800.0, 7000.0};
constexpr int kMaxPeaks = 5;

std::pair<double, double> SlotRange(int slot, int sample_rate) {
  const double nyq = 0.45 * sample_rate;
  return {std::min(kSlotEdges[slot], nyq - 1.0), std::min(kSlotEdges[slot + 1], nyq)};
}

}  // namespace

SyntheticSpeakerProfile RandomSpeaker(std::uint64_t seed, int sample_rate) {
  Rng rng(DeriveSeed(seed, 0x5be4));
  SyntheticSpeakerProfile p = SpeakerShell(seed, sample_rate, rng);
  const int n = rng.UniformInt(3, kMaxPeaks);
  for (int slot = 0; slot < n; ++slot) {
    const auto [lo, hi] = SlotRange(slot, sample_rate);
    p.peaks.push_back(RandomPeakShape(MelToHz(rng.Uniform(HzToMel(lo), HzToMel(hi))), rng));
  }
  return p;
}

std::vector<SyntheticSpeakerProfile> DisjointSpeakers(int count, std::uint64_t seed, int sample_rate) {
  if (count < 1) Fail(ErrorCode::kInvalidArgument, "speaker count must be positive");
  Rng rng(DeriveSeed(seed, 0xd15));
  // Per slot, a mel-spaced grid with one cell per speaker, dealt at random.
  std::vector<std::vector<double>> grid(kMaxPeaks);
  for (int slot = 0; slot < kMaxPeaks; ++slot) {
    const auto [lo, hi] = SlotRange(slot, sample_rate);
    const double mlo = HzToMel(lo), mhi = HzToMel(hi);
    for (int i = 0; i < count; ++i) grid[slot].push_back(MelToHz(mlo + (mhi - mlo) * (i + 0.5) / count));
    Shuffle(grid[slot], rng);
  }
  std::vector<SyntheticSpeakerProfile> out;
  for (int s = 0; s < count; ++s) {
    const std::uint64_t pseed = DeriveSeed(seed, static_cast<std::uint64_t>(s) + 1);
    Rng prng(pseed);
    SyntheticSpeakerProfile p = SpeakerShell(pseed, sample_rate, prng);
    const int n = prng.UniformInt(3, kMaxPeaks);
    for (int slot = 0; slot < n; ++slot) {
      p.peaks.push_back(RandomPeakShape(grid[slot][static_cast<std::size_t>(s)], prng));
    }
    out.push_back(std::move(p));
  }
  return out;
}

VoiceOptions PureToneOptions() {
  VoiceOptions o;
  o.voiced_level = 0.0;
  o.glottal_direct = 0.0;
  o.tone_level = 1.0;
  o.noise_level = 0.0;
  o.floor_level = 0.0;
  o.envelope_depth = 0.0;
  o.timbre_variation = 0.0;
  o.fricative_level = 0.0;
  o.pause_seconds = 0.0;
  return o;
}

audio::AudioBuffer SynthVoice(const SyntheticSpeakerProfile &profile, double duration_s,
                              std::uint64_t utterance_seed, const VoiceOptions &options) {
  profile.Validate();
  if (!(duration_s >= 1.0)) Fail(ErrorCode::kInvalidArgument, "utterances must last at least 1 s");
  const int sr = profile.sample_rate;
  const auto n = static_cast<std::size_t>(std::lround(duration_s * sr));
  Rng rng(DeriveSeed(profile.seed, utterance_seed, 0x0ce));
  const double depth = options.envelope_depth >= 0 ? options.envelope_depth : profile.envelope_depth;

  const std::size_t np = profile.peaks.size();
  std::vector<double> freq(np), phase(np), gain(np);
  for (std::size_t p = 0; p < np; ++p) {
    freq[p] = std::clamp(profile.peaks[p].freq_hz * (1.0 + options.freq_jitter * rng.Normal()), 50.0, 0.49 * sr);
    phase[p] = rng.Uniform(0.0, kTwoPi);
    gain[p] = profile.peaks[p].gain * std::max(0.1, 1.0 + 0.1 * rng.Normal());
  }
  const double f0 = profile.pitch_hz * (1.0 + 0.03 * rng.Normal());
  const double vibrato_phase = rng.Uniform(0.0, kTwoPi);

  // Syllables: a raised-sine envelope and fresh per-peak weights each.
  std::vector<double> env(n, 0.0), fric(n, 0.0);
  std::vector<std::vector<double>> weight(np, std::vector<double>(n, 0.0));
  // Recordings open with a short silence before the first phrase.
  std::size_t start = options.pause_seconds > 0
                          ? static_cast<std::size_t>(std::round(sr * options.pause_seconds * rng.Uniform(0.4, 1.0)))
                          : 0;
  int phrase_left = rng.UniformInt(3, 6);
  while (start < n) {
    if (options.pause_seconds > 0 && phrase_left-- == 0) {
      // Inter-phrase pause: only the broadband floor remains.
      start += static_cast<std::size_t>(std::round(sr * options.pause_seconds * rng.Uniform(0.6, 1.4)));
      phrase_left = rng.UniformInt(3, 6);
      continue;
    }
    if (options.fricative_level > 0 && rng.Uniform() < options.fricative_rate) {
      const auto flen = static_cast<std::size_t>(std::round(sr * rng.Uniform(0.06, 0.12)));
      for (std::size_t i = start; i < std::min(n, start + flen); ++i) {
        fric[i] = std::sin(std::numbers::pi * static_cast<double>(i - start) / static_cast<double>(flen));
      }
      start += flen;
      if (start >= n) break;
    }
    const auto len = static_cast<std::size_t>(
        std::max(1.0, std::round(sr / profile.syllable_rate_hz * rng.Uniform(0.8, 1.2))));
    std::vector<double> w(np);
    for (auto &x : w) x = 1.0 - options.timbre_variation * rng.Uniform();
    for (std::size_t i = start; i < std::min(n, start + len); ++i) {
      const double u = static_cast<double>(i - start) / static_cast<double>(len);
      env[i] = 1.0 - depth + depth * std::sin(std::numbers::pi * u);
      for (std::size_t p = 0; p < np; ++p) weight[p][i] = w[p] * gain[p];
    }
    start += len;
  }

  std::vector<double> out(n, 0.0);
  auto mix = [&out](std::vector<double> part, double level) {
    NormalizeRms(part);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += level * part[i];
  };

  if (options.voiced_level > 0) {
    // Glottal pulse train with slow vibrato, tilted by a leaky integrator.
    std::vector<double> source(n, 0.0);
    double cycle = 0.0, lp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sr;
      cycle += f0 * (1.0 + 0.02 * std::sin(kTwoPi * 0.5 * t + vibrato_phase)) / sr;
      double pulse = 0.0;
      if (cycle >= 1.0) {
        cycle -= 1.0;
        pulse = 1.0;
      }
      lp = pulse + 0.95 * lp;
      source[i] = lp;
    }
    const double mean = std::accumulate(source.begin(), source.end(), 0.0) / static_cast<double>(n);
    for (double &v : source) v -= mean;
    std::vector<double> voiced(n, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
      auto branch = Resonate(source, freq[p], profile.peaks[p].bandwidth_hz, sr);
      NormalizeRms(branch);
      for (std::size_t i = 0; i < n; ++i) voiced[i] += weight[p][i] * branch[i];
    }
    NormalizeRms(voiced);
    std::vector<double> direct = source;
    NormalizeRms(direct);
    for (std::size_t i = 0; i < n; ++i) voiced[i] = env[i] * (voiced[i] + options.glottal_direct * direct[i]);
    mix(std::move(voiced), options.voiced_level);
  }
  if (options.tone_level > 0) {
    std::vector<double> tones(n, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
      std::vector<double> g(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = env[i] * weight[p][i];
      AddTone(tones, g, freq[p], phase[p], sr);
    }
    mix(std::move(tones), options.tone_level);
  }
  if (options.noise_level > 0) {
    std::vector<double> shaped(n, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
      std::vector<double> white(n);
      for (double &v : white) v = rng.Normal();
      auto branch = Resonate(white, freq[p], profile.peaks[p].bandwidth_hz, sr);
      NormalizeRms(branch);
      for (std::size_t i = 0; i < n; ++i) shaped[i] += env[i] * weight[p][i] * branch[i];
    }
    mix(std::move(shaped), options.noise_level);
  }
  if (options.fricative_level > 0) {
    std::vector<double> white(n);
    for (double &v : white) v = rng.Normal();
    auto burst = Resonate(white, profile.fricative_hz, profile.fricative_bandwidth_hz, sr);
    NormalizeRms(burst);
    for (std::size_t i = 0; i < n; ++i) burst[i] *= fric[i];
    mix(std::move(burst), options.fricative_level);
  }
  if (options.floor_level > 0) {
    std::vector<double> white(n);
    for (double &v : white) v = rng.Normal();
    mix(std::move(white), options.floor_level);
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0) {
    for (double &v : out) v *= options.amplitude / peak;
  }
  return audio::AudioBuffer{std::move(out), sr};
}

std::vector<double> BandpassTaps(double low_hz, double high_hz, int sample_rate, int num_taps) {
  if (num_taps < 3 || num_taps % 2 == 0) Fail(ErrorCode::kInvalidArgument, "tap count must be odd and >= 3");
  if (!(low_hz > 0 && low_hz < high_hz && high_hz < sample_rate / 2.0)) {
    Fail(ErrorCode::kInvalidArgument, "band edges must satisfy 0 < low < high < Nyquist");
  }
  const double fl = low_hz / sample_rate, fh = high_hz / sample_rate;
  const int mid = num_taps / 2;
  std::vector<double> h(static_cast<std::size_t>(num_taps));
  for (int k = 0; k < num_taps; ++k) {
    const int m = k - mid;
    double ideal;
    if (m == 0) {
      ideal = 2.0 * (fh - fl);
    } else {
      const double x = std::numbers::pi * m;
      ideal = (std::sin(2.0 * x * fh) - std::sin(2.0 * x * fl)) / x;
    }
    const double window = 0.54 - 0.46 * std::cos(kTwoPi * k / (num_taps - 1));
    h[static_cast<std::size_t>(k)] = ideal * window;
  }
  return h;
}

audio::AudioBuffer SimulateReplayVoice(const audio::AudioBuffer &buf, const ReplayOptions &options) {
  buf.Validate();
  const auto taps = BandpassTaps(options.low_hz, options.high_hz, buf.sample_rate, options.num_taps);
  const auto n = static_cast<std::ptrdiff_t>(buf.samples.size());
  const auto mid = static_cast<std::ptrdiff_t>(taps.size() / 2);
  std::vector<double> y(buf.samples.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(taps.size()); ++k) {
      const std::ptrdiff_t j = i + k - mid;
      if (j >= 0 && j < n) acc += taps[static_cast<std::size_t>(k)] * buf.samples[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  const double noise_rms = std::max(Rms(y), 1e-4) * std::pow(10.0, -options.snr_db / 20.0);
  Rng rng(DeriveSeed(options.seed, 0x4e9));
  for (double &v : y) v = std::clamp(v + noise_rms * rng.Normal(), -options.clip, options.clip);
  return audio::AudioBuffer{std::move(y), buf.sample_rate};
}

// ---- face ----

SyntheticFaceProfile RandomFace(std::uint64_t seed, int side) {
  if (side < image::kMinSide) Fail(ErrorCode::kInvalidArgument, "face side too small");
  Rng rng(DeriveSeed(seed, 0xface));
  SyntheticFaceProfile p;
  p.seed = seed;
  p.side = side;
  p.base_level = rng.Uniform(90.0, 140.0);
  p.texture_amplitude = rng.Uniform(6.0, 12.0);
  // Shared layout: head, two eyes, mouth; positions and contrast vary.
  p.blobs.push_back({0.5 + 0.03 * rng.Normal(), 0.5 + 0.03 * rng.Normal(), rng.Uniform(0.3, 0.4),
                     rng.Uniform(25.0, 50.0)});
  const double eye_row = rng.Uniform(0.33, 0.43), eye_gap = rng.Uniform(0.12, 0.2);
  const double eye_r = rng.Uniform(0.05, 0.09), eye_a = -rng.Uniform(30.0, 70.0);
  p.blobs.push_back({eye_row, 0.5 - eye_gap, eye_r, eye_a});
  p.blobs.push_back({eye_row, 0.5 + eye_gap, eye_r, eye_a});
  p.blobs.push_back({rng.Uniform(0.65, 0.75), 0.5, rng.Uniform(0.06, 0.1), -rng.Uniform(20.0, 50.0)});
  const int extra = rng.UniformInt(4, 7);
  for (int i = 0; i < extra; ++i) {
    const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
    p.blobs.push_back({rng.Uniform(0.15, 0.85), rng.Uniform(0.15, 0.85), rng.Uniform(0.06, 0.16),
                       sign * rng.Uniform(15.0, 45.0)});
  }
  return p;
}

image::FrameImage SynthFace(const SyntheticFaceProfile &profile, std::uint64_t capture_seed,
                            const CaptureOptions &options) {
  const int side = profile.side;
  const Eigen::MatrixXd texture = TextureField(profile.seed, side);
  Rng rng(DeriveSeed(profile.seed, capture_seed, 0xca9));
  const double dy = rng.Uniform(-options.max_shift_px, options.max_shift_px);
  const double dx = rng.Uniform(-options.max_shift_px, options.max_shift_px);
  const double gain = 1.0 + options.gain_jitter * (2.0 * rng.Uniform() - 1.0);
  const double offset = options.offset_jitter * (2.0 * rng.Uniform() - 1.0);
  const double noise = rng.Uniform(options.min_noise_sigma, options.max_noise_sigma);

  image::FrameImage img;
  img.source = "synthetic";
  img.pixels.resize(side, side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double y = r - dy, x = c - dx;
      double v = profile.base_level + profile.texture_amplitude * SampleBilinear(texture, y, x);
      for (const auto &b : profile.blobs) {
        const double by = b.row * (side - 1), bx = b.col * (side - 1), rad = b.radius * side;
        const double d2 = (y - by) * (y - by) + (x - bx) * (x - bx);
        v += b.amplitude * std::exp(-d2 / (2.0 * rad * rad));
      }
      v = gain * v + offset + noise * rng.Normal();
      img.pixels(r, c) = std::clamp(std::round(v), 0.0, 255.0);
    }
  }
  return img;
}

image::FrameSequence SynthFaceVideo(const SyntheticFaceProfile &profile, double seconds, double fps,
                                    std::uint64_t seed, const CaptureOptions &options) {
  if (!(seconds > 0) || !(fps > 0)) Fail(ErrorCode::kInvalidArgument, "video length and fps must be positive");
  image::FrameSequence seq;
  seq.fps = fps;
  const auto count = static_cast<std::uint64_t>(std::lround(seconds * fps));
  for (std::uint64_t i = 0; i < count; ++i) seq.frames.push_back(SynthFace(profile, DeriveSeed(seed, i), options));
  return seq;
}

image::FrameImage SimulateRecaptureFace(const image::FrameImage &img, const RecaptureOptions &options) {
  img.Validate();
  const int h = img.height(), w = img.width();
  Eigen::MatrixXd x = image::GaussianBlur(img.pixels, options.blur_sigma);
  x = image::ResizeBilinear(x, std::max(1, h / 2), std::max(1, w / 2));
  x = image::ResizeBilinear(x, h, w);
  Rng rng(DeriveSeed(options.seed, 0x9ec));
  image::FrameImage out;
  out.source = img.source;
  out.pixels.resize(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = 128.0 + options.contrast * (x(r, c) - 128.0) + options.noise_sigma * rng.Normal();
      out.pixels(r, c) = std::clamp(std::round(v), 0.0, 255.0);
    }
  }
  return out;
}

// ---- keystrokes ----

void SyntheticTypistProfile::Validate() const {
  if (keys.empty()) Fail(ErrorCode::kInvalidArgument, "typist has no keys");
  for (const auto &[k, t] : dwell) {
    if (!(t.mean_ms > 0) || t.std_ms < 0) Fail(ErrorCode::kInvalidArgument, "bad dwell timing for " + k);
  }
  for (const auto &[k, t] : flight) {
    if (!(t.mean_ms > 0) || t.std_ms < 0) Fail(ErrorCode::kInvalidArgument, "bad flight timing for " + k);
  }
}

const std::vector<std::string> &TypingKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (char c = 'a'; c <= 'z'; ++c) k.emplace_back(1, c);
    k.emplace_back("space");
    return k;
  }();
  return keys;
}

std::vector<SyntheticTypistProfile> TypistPopulation(int count, std::uint64_t seed,
                                                     const TypistPopulationOptions &options) {
  if (count < 1) Fail(ErrorCode::kInvalidArgument, "typist count must be positive");
  const auto &keys = TypingKeys();
  Rng rng(DeriveSeed(seed, 0x7e9));
  std::vector<SyntheticTypistProfile> out(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    out[static_cast<std::size_t>(t)].seed = DeriveSeed(seed, static_cast<std::uint64_t>(t) + 1);
    out[static_cast<std::size_t>(t)].keys = keys;
  }
  const double spacing = options.dwell_separation * options.dwell_std_ms;
  for (const auto &k : keys) {
    std::vector<int> slot(static_cast<std::size_t>(count));
    std::iota(slot.begin(), slot.end(), 0);
    Shuffle(slot, rng);
    for (int t = 0; t < count; ++t) {
      out[static_cast<std::size_t>(t)].dwell[k] = {
          options.dwell_base_ms + spacing * slot[static_cast<std::size_t>(t)], options.dwell_std_ms};
    }
  }
  for (auto &p : out) {
    Rng prng(DeriveSeed(p.seed, 0xf11));
    std::map<std::string, double> first, second;
    for (const auto &k : keys) {
      first[k] = prng.Uniform(0.0, options.flight_spread_ms);
      second[k] = prng.Uniform(0.0, options.flight_spread_ms);
    }
    for (const auto &a : keys) {
      for (const auto &b : keys) {
        p.flight[keystroke::PairKey(a, b)] = {options.flight_base_ms + first[a] + second[b], options.flight_std_ms};
      }
    }
  }
  return out;
}

std::vector<keystroke::KeyEvent> SynthTyping(const SyntheticTypistProfile &profile, int n_keystrokes,
                                             std::uint64_t seed) {
  profile.Validate();
  if (n_keystrokes < 1) Fail(ErrorCode::kInvalidArgument, "need at least one keystroke");
  Rng rng(DeriveSeed(profile.seed, seed, 0x7c9));
  std::vector<keystroke::KeyEvent> out;
  out.reserve(static_cast<std::size_t>(n_keystrokes));
  double down = 0.0;
  std::string prev;
  for (int i = 0; i < n_keystrokes; ++i) {
    const std::string &key = profile.keys[static_cast<std::size_t>(
        rng.UniformInt(0, static_cast<int>(profile.keys.size()) - 1))];
    if (i > 0) {
      const auto it = profile.flight.find(keystroke::PairKey(prev, key));
      const KeyTiming ft = it != profile.flight.end() ? it->second : KeyTiming{150.0, 30.0};
      down += std::max(1.0, ft.mean_ms + ft.std_ms * rng.Normal());
    }
    const auto it = profile.dwell.find(key);
    const KeyTiming dt = it != profile.dwell.end() ? it->second : KeyTiming{100.0, 10.0};
    const double dwell = std::max(1.0, dt.mean_ms + dt.std_ms * rng.Normal());
    out.push_back({key, down, down + dwell});
    prev = key;
  }
  return out;
}

}  // namespace trustauth::synth
