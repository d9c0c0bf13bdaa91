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

#ifndef TRUSTAUTH_EVALUATE_HPP_
#define TRUSTAUTH_EVALUATE_HPP_

// Synthetic end-to-end evaluations per instrument. Genuine trials pair an
// identity with fresh probes of its own profile, impostor trials with the
// probes of every other profile.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trustauth/audio.hpp"
#include "trustauth/metrics.hpp"
#include "trustauth/pad_face.hpp"
#include "trustauth/pad_voice.hpp"
#include "trustauth/speaker.hpp"
#include "trustauth/synth.hpp"
#include "trustauth/types.hpp"

namespace trustauth::eval {

struct EvalReport {
  Instrument instrument = Instrument::kKD;
  // Higher = more genuine (KD distances are negated; PAD: bona fide vs attack).
  std::vector<double> genuine;
  std::vector<double> impostor;
  metrics::Sweep sweep;
  std::optional<metrics::ErrorRates> pad;  // PAD instruments, decisions at score 0
  Json settings = Json::object();

  // {instrument, n_genuine, n_impostor, far, frr, eer, acer?, det, settings}
  Json ToJson() const;
  std::string DetCsv() const;
};

EvalReport MakeReport(Instrument instrument, std::vector<double> genuine, std::vector<double> impostor);

// ---- voice background models ----

struct VoiceSystemOptions {
  audio::FrontendConfig frontend;
  int background_speakers = 30;
  int utterances_per_speaker = 4;
  double utterance_seconds = 3.0;
  int ubm_components = 32;
  int ubm_iterations = 10;
  int tv_rank = 20;
  int tv_iterations = 5;
  std::uint64_t seed = 1;
};

// UBM and total-variability matrix trained on random background speakers
// that never appear as evaluation targets.
speaker::SpeakerModel TrainVoiceSystem(const VoiceSystemOptions &options);

// ---- verification instruments ----

struct KdEvalOptions {
  int typists = 20;
  int enroll_keystrokes = 750;
  int probe_keystrokes = 150;
  int probes_per_typist = 10;
  std::uint64_t seed = 1;
  synth::TypistPopulationOptions population;
};

EvalReport EvaluateKd(const KdEvalOptions &options);

struct VrEvalOptions {
  VoiceSystemOptions system;
  int speakers = 10;
  int enroll_samples = 15;
  int sessions = 3;
  double enroll_seconds = 10.0;
  int probes_per_speaker = 10;
  double probe_seconds = 5.0;
  std::uint64_t seed = 1;
};

EvalReport EvaluateVr(const VrEvalOptions &options);
EvalReport EvaluateVr(const VrEvalOptions &options, const speaker::SpeakerModel &model);

struct FrEvalOptions {
  int identities = 10;
  double enroll_seconds = 5.0;
  double fps = 10.0;
  int probes_per_identity = 10;
  double probe_seconds = 1.0;
  std::uint64_t seed = 1;
};

// Scores are the mean per-frame best cosine, a finer-grained statistic than
// the accepted-frame fraction.
EvalReport EvaluateFr(const FrEvalOptions &options);

// ---- PAD instruments ----

struct FraCorpus {
  std::vector<image::FrameImage> train_bona_fide, train_attack, test_bona_fide, test_attack;
};

struct FraEvalOptions {
  int train_bona_fide = 200;
  int train_attack = 200;
  int test_bona_fide = 100;
  int test_attack = 100;
  int identities = 20;  // disjoint halves for training and testing
  std::uint64_t seed = 1;
  pad::PadTrainOptions training;
};

FraCorpus BuildFraCorpus(const FraEvalOptions &options);
pad::LinearPadModel TrainFraModel(const FraCorpus &corpus, const pad::PadTrainOptions &training);
EvalReport EvaluateFra(const FraEvalOptions &options);
EvalReport EvaluateFra(const FraCorpus &corpus, const pad::LinearPadModel &model);

struct VraCorpus {
  std::vector<audio::AudioBuffer> train_bona_fide, calibration_bona_fide, test_bona_fide, test_attack;
};

struct VraEvalOptions {
  int train_bona_fide = 100;
  int test_bona_fide = 50;
  int test_attack = 50;
  int calibration_bona_fide = 50;  // held out, sets the operating threshold
  double target_bpcer = 0.05;
  int train_speakers = 100;
  int calibration_speakers = 50;
  int test_speakers = 50;
  double seconds = 3.0;
  std::uint64_t seed = 1;
  audio::FrontendConfig frontend;
  pad::OccOptions occ;
};

VraCorpus BuildVraCorpus(const VraEvalOptions &options);
// Trains on train_bona_fide, then recalibrates the threshold to target_bpcer
// on calibration_bona_fide (skipped when that set is empty).
pad::OccGmm TrainVraModel(const VraCorpus &corpus, const VraEvalOptions &options);
EvalReport EvaluateVra(const VraEvalOptions &options);
EvalReport EvaluateVra(const VraCorpus &corpus, const pad::OccGmm &model);

}  // namespace trustauth::eval

#endif  // TRUSTAUTH_EVALUATE_HPP_
