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

#include "trustauth/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "trustauth/crypto.hpp"
#include "trustauth/error.hpp"

namespace trustauth::audio {

void AudioBuffer::Validate() const {
  if (sample_rate <= 0) Fail(ErrorCode::kUnsupportedFormat, "sample rate must be positive");
  for (double x : samples) {
    if (!std::isfinite(x)) Fail(ErrorCode::kMalformedSample, "audio contains non-finite samples");
  }
}

void FrontendConfig::Validate() const {
  if (sample_rate <= 0) Fail(ErrorCode::kConfig, "sample_rate must be positive");
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) Fail(ErrorCode::kConfig, "preemphasis must be in [0, 1)");
  if (!(frame_step > 0.0) || !(frame_len >= frame_step)) {
    Fail(ErrorCode::kConfig, "need frame_len >= frame_step > 0");
  }
  if (FrameSamples() < 2 || StepSamples() < 1) Fail(ErrorCode::kConfig, "frame too short for sample rate");
  if (n_fft != 0 && (n_fft < FrameSamples() || (n_fft & (n_fft - 1)) != 0)) {
    Fail(ErrorCode::kConfig, "n_fft must be a power of two >= frame samples");
  }
  if (n_mels < 2) Fail(ErrorCode::kConfig, "n_mels must be >= 2");
  if (n_ceps < 1 || n_ceps > n_mels) Fail(ErrorCode::kConfig, "need 1 <= n_ceps <= n_mels");
  if (delta_order < 0 || delta_order > 2) Fail(ErrorCode::kConfig, "delta_order must be 0, 1 or 2");
  if (delta_window < 1) Fail(ErrorCode::kConfig, "delta_window must be >= 1");
  if (!(vad_energy_quantile >= 0.0 && vad_energy_quantile <= 1.0)) {
    Fail(ErrorCode::kConfig, "vad_energy_quantile must be in [0, 1]");
  }
}

int FrontendConfig::FrameSamples() const {
  return static_cast<int>(std::lround(frame_len * sample_rate));
}

int FrontendConfig::StepSamples() const {
  return static_cast<int>(std::lround(frame_step * sample_rate));
}

int FrontendConfig::FftSize() const {
  if (n_fft > 0) return n_fft;
  int n = 1;
  while (n < FrameSamples()) n <<= 1;
  return n;
}

std::string FrontendConfig::Digest() const { return Sha256Hex(Json(*this).dump()); }

void to_json(Json &j, const FrontendConfig &c) {
  j = Json{{"sample_rate", c.sample_rate},       {"preemphasis", c.preemphasis},
           {"frame_len", c.frame_len},           {"frame_step", c.frame_step},
           {"n_fft", c.n_fft},                   {"n_mels", c.n_mels},
           {"n_ceps", c.n_ceps},                 {"delta_order", c.delta_order},
           {"delta_window", c.delta_window},     {"vad_energy_quantile", c.vad_energy_quantile},
           {"vad_offset_db", c.vad_offset_db}};
}

void from_json(const Json &j, FrontendConfig &c) {
  FrontendConfig d;
  c.sample_rate = j.value("sample_rate", d.sample_rate);
  c.preemphasis = j.value("preemphasis", d.preemphasis);
  c.frame_len = j.value("frame_len", d.frame_len);
  c.frame_step = j.value("frame_step", d.frame_step);
  c.n_fft = j.value("n_fft", d.n_fft);
  c.n_mels = j.value("n_mels", d.n_mels);
  c.n_ceps = j.value("n_ceps", d.n_ceps);
  c.delta_order = j.value("delta_order", d.delta_order);
  c.delta_window = j.value("delta_window", d.delta_window);
  c.vad_energy_quantile = j.value("vad_energy_quantile", d.vad_energy_quantile);
  c.vad_offset_db = j.value("vad_offset_db", d.vad_offset_db);
}

Json MfccToJson(const MfccMatrix &m) {
  Json j = MatrixToJson(m.frames);
  j["frame_step"] = m.frame_step;
  j["config_digest"] = m.config_digest;
  return j;
}

MfccMatrix MfccFromJson(const Json &j) {
  MfccMatrix m;
  m.frames = MatrixFromJson(j);
  m.frame_step = j.value("frame_step", 0.0);
  m.config_digest = j.value("config_digest", "");
  return m;
}

AudioBuffer Preemphasize(const AudioBuffer &buf, double coeff) {
  if (!(coeff >= 0.0 && coeff < 1.0)) Fail(ErrorCode::kInvalidArgument, "preemphasis must be in [0, 1)");
  AudioBuffer out = buf;
  for (std::size_t n = buf.samples.size(); n-- > 1;) {
    out.samples[n] = buf.samples[n] - coeff * buf.samples[n - 1];
  }
  return out;
}

Eigen::VectorXd HammingWindow(int n) {
  Eigen::VectorXd w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  return w;
}

namespace {

Eigen::Index FrameCount(std::size_t n_samples, int frame, int step) {
  if (n_samples < static_cast<std::size_t>(frame)) return 0;
  return static_cast<Eigen::Index>((n_samples - frame) / step + 1);
}

}  // namespace

Eigen::MatrixXd FrameAndWindow(const AudioBuffer &buf, double frame_len, double frame_step) {
  if (!(frame_step > 0.0) || !(frame_len >= frame_step)) {
    Fail(ErrorCode::kInvalidArgument, "need frame_len >= frame_step > 0");
  }
  const int frame = static_cast<int>(std::lround(frame_len * buf.sample_rate));
  const int step = std::max(1, static_cast<int>(std::lround(frame_step * buf.sample_rate)));
  const Eigen::Index count = FrameCount(buf.samples.size(), frame, step);
  if (count == 0 || frame < 1) {
    Fail(ErrorCode::kAudioTooShort, std::to_string(buf.samples.size()) + " samples is shorter than one " +
                                        std::to_string(frame) + "-sample frame");
  }
  const Eigen::VectorXd window = HammingWindow(frame);
  Eigen::MatrixXd frames(count, frame);
  for (Eigen::Index t = 0; t < count; ++t) {
    const double *start = buf.samples.data() + t * step;
    for (int i = 0; i < frame; ++i) frames(t, i) = start[i] * window[i];
  }
  return frames;
}

Eigen::VectorXd PowerSpectrum(std::span<const double> frame, int n_fft) {
  if (n_fft < 1 || static_cast<std::size_t>(n_fft) < frame.size()) {
    Fail(ErrorCode::kInvalidArgument, "frame longer than n_fft");
  }
  thread_local Eigen::FFT<double> fft;
  std::vector<double> padded(static_cast<std::size_t>(n_fft), 0.0);
  std::copy(frame.begin(), frame.end(), padded.begin());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  Eigen::VectorXd power(n_fft / 2 + 1);
  for (int k = 0; k <= n_fft / 2; ++k) power[k] = std::norm(spec[static_cast<std::size_t>(k)]);
  return power;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

// n_mels + 2 edge frequencies in Hz.
Eigen::VectorXd MelEdges(int sample_rate, int n_mels) {
  const double top = HzToMel(sample_rate / 2.0);
  Eigen::VectorXd edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) edges[i] = MelToHz(top * i / (n_mels + 1));
  return edges;
}

}  // namespace

Eigen::VectorXd MelCenterFrequencies(int sample_rate, int n_mels) {
  return MelEdges(sample_rate, n_mels).segment(1, n_mels);
}

Eigen::MatrixXd MelFilterbank(int n_fft, int sample_rate, int n_mels) {
  if (n_mels < 2) Fail(ErrorCode::kInvalidArgument, "n_mels must be >= 2");
  const Eigen::VectorXd edges = MelEdges(sample_rate, n_mels);
  const int n_bins = n_fft / 2 + 1;
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      fb(m, k) = std::max(0.0, std::min(rise, fall));
    }
  }
  return fb;
}

Eigen::VectorXd MelFilterbankEnergies(const Eigen::VectorXd &spectrum, int sample_rate, int n_mels) {
  const int n_fft = 2 * static_cast<int>(spectrum.size() - 1);
  const Eigen::VectorXd energies = MelFilterbank(n_fft, sample_rate, n_mels) * spectrum;
  return energies.unaryExpr([](double e) { return std::log(std::max(e, kLogFloor)); });
}

Eigen::VectorXd Dct2(const Eigen::VectorXd &x, int n_out) {
  const auto n = static_cast<int>(x.size());
  Eigen::VectorXd out(n_out);
  for (int k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x[i] * std::cos(std::numbers::pi * k * (2 * i + 1) / (2.0 * n));
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
  }
  return out;
}

Eigen::MatrixXd Deltas(const Eigen::MatrixXd &feats, int window) {
  const Eigen::Index t_max = feats.rows();
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += k * k;
  denom *= 2.0;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_max, feats.cols());
  for (Eigen::Index t = 0; t < t_max; ++t) {
    for (int k = 1; k <= window; ++k) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + k, t_max - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - k, 0);
      out.row(t) += k * (feats.row(ahead) - feats.row(behind));
    }
  }
  return out / denom;
}

MfccMatrix Mfcc(const AudioBuffer &buf, const FrontendConfig &cfg) {
  cfg.Validate();
  buf.Validate();
  if (buf.sample_rate != cfg.sample_rate) {
    Fail(ErrorCode::kUnsupportedFormat, "audio is " + std::to_string(buf.sample_rate) +
                                            " Hz, front-end expects " + std::to_string(cfg.sample_rate) + " Hz");
  }
  const AudioBuffer emphasized = Preemphasize(buf, cfg.preemphasis);
  const Eigen::MatrixXd frames = FrameAndWindow(emphasized, cfg.frame_len, cfg.frame_step);
  const int n_fft = cfg.FftSize();
  const Eigen::MatrixXd fb = MelFilterbank(n_fft, cfg.sample_rate, cfg.n_mels);

  Eigen::MatrixXd ceps(frames.rows(), cfg.n_ceps);
  std::vector<double> row(static_cast<std::size_t>(frames.cols()));
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    for (Eigen::Index i = 0; i < frames.cols(); ++i) row[static_cast<std::size_t>(i)] = frames(t, i);
    const Eigen::VectorXd energies = fb * PowerSpectrum(row, n_fft);
    const Eigen::VectorXd logmel = energies.unaryExpr([](double e) { return std::log(std::max(e, kLogFloor)); });
    ceps.row(t) = Dct2(logmel, cfg.n_ceps).transpose();
  }

  MfccMatrix out;
  out.frame_step = cfg.frame_step;
  out.config_digest = cfg.Digest();
  out.frames.resize(ceps.rows(), cfg.FeatureDim());
  out.frames.leftCols(cfg.n_ceps) = ceps;
  if (cfg.delta_order >= 1) {
    const Eigen::MatrixXd d1 = Deltas(ceps, cfg.delta_window);
    out.frames.middleCols(cfg.n_ceps, cfg.n_ceps) = d1;
    if (cfg.delta_order >= 2) out.frames.rightCols(cfg.n_ceps) = Deltas(d1, cfg.delta_window);
  }
  return out;
}

std::vector<double> FrameEnergies(const AudioBuffer &buf, const FrontendConfig &cfg) {
  const int frame = cfg.FrameSamples();
  const int step = cfg.StepSamples();
  const Eigen::Index count = FrameCount(buf.samples.size(), frame, step);
  if (count == 0) Fail(ErrorCode::kAudioTooShort, "audio shorter than one frame");
  std::vector<double> energies(static_cast<std::size_t>(count));
  for (Eigen::Index t = 0; t < count; ++t) {
    double acc = 0.0;
    for (int i = 0; i < frame; ++i) {
      const double x = buf.samples[static_cast<std::size_t>(t * step + i)];
      acc += x * x;
    }
    energies[static_cast<std::size_t>(t)] = acc / frame;
  }
  return energies;
}

std::vector<bool> VoiceActivityMask(const AudioBuffer &buf, const FrontendConfig &cfg) {
  cfg.Validate();
  const std::vector<double> energies = FrameEnergies(buf, cfg);
  std::vector<double> db(energies.size());
  bool any_above_floor = false;
  for (std::size_t t = 0; t < energies.size(); ++t) {
    db[t] = 10.0 * std::log10(energies[t] + 1e-20);
    any_above_floor = any_above_floor || energies[t] >= kSilenceFloor;
  }
  if (!any_above_floor) Fail(ErrorCode::kAllSilent, "every frame is below the silence floor");

  // Lower empirical quantile (nearest rank, no interpolation).
  std::vector<double> sorted = db;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::floor(cfg.vad_energy_quantile * static_cast<double>(sorted.size() - 1)));
  const double threshold = sorted[rank] + cfg.vad_offset_db;

  std::vector<bool> mask(energies.size());
  bool any_kept = false;
  for (std::size_t t = 0; t < energies.size(); ++t) {
    mask[t] = energies[t] >= kSilenceFloor && db[t] > threshold;
    any_kept = any_kept || mask[t];
  }
  if (!any_kept) {
    for (std::size_t t = 0; t < energies.size(); ++t) mask[t] = energies[t] >= kSilenceFloor;
  }
  return mask;
}

MfccMatrix VoicedMfcc(const AudioBuffer &buf, const FrontendConfig &cfg) {
  MfccMatrix all = Mfcc(buf, cfg);
  const std::vector<bool> mask = VoiceActivityMask(buf, cfg);
  const auto kept = static_cast<Eigen::Index>(std::count(mask.begin(), mask.end(), true));
  MfccMatrix out;
  out.frame_step = all.frame_step;
  out.config_digest = all.config_digest;
  out.frames.resize(kept, all.frames.cols());
  Eigen::Index r = 0;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask[t]) out.frames.row(r++) = all.frames.row(static_cast<Eigen::Index>(t));
  }
  return out;
}

}  // namespace trustauth::audio
