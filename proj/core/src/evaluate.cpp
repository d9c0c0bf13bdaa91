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

#include "trustauth/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include "trustauth/error.hpp"
#include "trustauth/face.hpp"
#include "trustauth/gmm.hpp"
#include "trustauth/keystroke.hpp"

namespace trustauth::eval {
namespace {

// Stream tags keep the seeds of different corpora apart.
enum Tag : std::uint64_t {
  kBackground = 0xb0,
  kEnroll = 0xe1,
  kProbe = 0x9b,
  kTrainBona = 0x7b,
  kTrainAttack = 0x7a,
  kTestBona = 0x5b,
  kTestAttack = 0x5a,
  kAttackChannel = 0xac,
  kSpeakers = 0x5e,
  kTrainSpeakers = 0x75,
  kTestSpeakers = 0x55,
  kCalibration = 0xca,
  kCalibrationSpeakers = 0xc5,
};

double Mean(const std::vector<double> &v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

EvalReport MakeReport(Instrument instrument, std::vector<double> genuine, std::vector<double> impostor) {
  EvalReport r;
  r.instrument = instrument;
  r.genuine = std::move(genuine);
  r.impostor = std::move(impostor);
  r.sweep = metrics::SweepThresholds(r.genuine, r.impostor);
  return r;
}

Json EvalReport::ToJson() const {
  Json j{{"instrument", ToString(instrument)},
         {"n_genuine", genuine.size()},
         {"n_impostor", impostor.size()},
         {"far", sweep.rates.far},
         {"frr", sweep.rates.frr},
         {"eer", sweep.rates.eer},
         {"eer_threshold", sweep.rates.eer_threshold},
         {"det", metrics::DetToJson(sweep.det)},
         {"settings", settings}};
  if (pad) {
    j["apcer"] = pad->apcer;
    j["bpcer"] = pad->bpcer;
    j["acer"] = pad->acer;
  }
  return j;
}

std::string EvalReport::DetCsv() const { return metrics::DetToCsv(sweep.det); }

speaker::SpeakerModel TrainVoiceSystem(const VoiceSystemOptions &options) {
  options.frontend.Validate();
  std::vector<audio::MfccMatrix> utterances;
  for (int b = 0; b < options.background_speakers; ++b) {
    const auto profile = synth::RandomSpeaker(synth::DeriveSeed(options.seed, kBackground, static_cast<std::uint64_t>(b)),
                                              options.frontend.sample_rate);
    for (int u = 0; u < options.utterances_per_speaker; ++u) {
      const auto buf = synth::SynthVoice(profile, options.utterance_seconds, static_cast<std::uint64_t>(u));
      utterances.push_back(audio::VoicedMfcc(buf, options.frontend));
    }
  }
  gmm::DiagGmm ubm = gmm::TrainUbm(utterances, options.ubm_components, options.ubm_iterations, options.seed);
  std::vector<speaker::BaumWelchStats> stats;
  stats.reserve(utterances.size());
  for (const auto &u : utterances) stats.push_back(speaker::AccumulateStats(u.frames, ubm));
  auto tv = speaker::TrainTvMatrix(stats, ubm, options.tv_rank, options.tv_iterations, options.seed);
  return speaker::SpeakerModel(options.frontend, std::move(ubm), std::move(tv));
}

EvalReport EvaluateKd(const KdEvalOptions &options) {
  if (options.typists < 2) Fail(ErrorCode::kInvalidArgument, "evaluation needs at least two typists");
  const auto typists = synth::TypistPopulation(options.typists, options.seed, options.population);
  std::vector<TypingModel> models;
  std::vector<std::vector<keystroke::KeystrokeFeatures>> probes(typists.size());
  for (std::size_t t = 0; t < typists.size(); ++t) {
    const auto enroll = synth::SynthTyping(typists[t], options.enroll_keystrokes, kEnroll);
    models.push_back(keystroke::BuildTypingModel(enroll, static_cast<std::size_t>(options.enroll_keystrokes)));
    for (int p = 0; p < options.probes_per_typist; ++p) {
      const auto stream = synth::SynthTyping(typists[t], options.probe_keystrokes,
                                             synth::DeriveSeed(kProbe, static_cast<std::uint64_t>(p)));
      probes[t].push_back(keystroke::ExtractFeatures(stream));
    }
  }
  std::vector<double> genuine, impostor;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t t = 0; t < probes.size(); ++t) {
      for (const auto &probe : probes[t]) {
        const double score = -keystroke::TypingDistance(models[m], probe);
        (m == t ? genuine : impostor).push_back(score);
      }
    }
  }
  EvalReport r = MakeReport(Instrument::kKD, std::move(genuine), std::move(impostor));
  r.settings = Json{{"typists", options.typists},
                    {"enroll_keystrokes", options.enroll_keystrokes},
                    {"probe_keystrokes", options.probe_keystrokes},
                    {"probes_per_typist", options.probes_per_typist},
                    {"seed", options.seed},
                    {"score", "negated scaled Manhattan distance"}};
  return r;
}

EvalReport EvaluateVr(const VrEvalOptions &options) {
  VoiceSystemOptions sys = options.system;
  sys.seed = synth::DeriveSeed(options.seed, kBackground);
  return EvaluateVr(options, TrainVoiceSystem(sys));
}

EvalReport EvaluateVr(const VrEvalOptions &options, const speaker::SpeakerModel &model) {
  if (options.speakers < 2) Fail(ErrorCode::kInvalidArgument, "evaluation needs at least two speakers");
  const auto speakers = synth::DisjointSpeakers(options.speakers, synth::DeriveSeed(options.seed, kSpeakers),
                                                model.frontend().sample_rate);
  std::vector<std::vector<IVector>> enrolled(speakers.size());
  std::vector<std::vector<IVector>> probes(speakers.size());
  for (std::size_t s = 0; s < speakers.size(); ++s) {
    for (int i = 0; i < options.enroll_samples; ++i) {
      const auto buf = synth::SynthVoice(speakers[s], options.enroll_seconds,
                                         synth::DeriveSeed(options.seed, kEnroll, static_cast<std::uint64_t>(i)));
      enrolled[s].push_back(model.Extract(buf));
    }
    for (int p = 0; p < options.probes_per_speaker; ++p) {
      const auto buf = synth::SynthVoice(speakers[s], options.probe_seconds,
                                         synth::DeriveSeed(options.seed, kProbe, static_cast<std::uint64_t>(p)));
      probes[s].push_back(model.Extract(buf));
    }
  }
  std::vector<double> genuine, impostor;
  for (std::size_t m = 0; m < speakers.size(); ++m) {
    for (std::size_t s = 0; s < speakers.size(); ++s) {
      for (const auto &probe : probes[s]) {
        const double score = speaker::ScoreSpeaker(enrolled[m], probe, 0.0).score;
        (m == s ? genuine : impostor).push_back(score);
      }
    }
  }
  EvalReport r = MakeReport(Instrument::kVR, std::move(genuine), std::move(impostor));
  r.settings = Json{{"speakers", options.speakers},
                    {"enroll_samples", options.enroll_samples},
                    {"sessions", options.sessions},
                    {"enroll_seconds", options.enroll_seconds},
                    {"probes_per_speaker", options.probes_per_speaker},
                    {"probe_seconds", options.probe_seconds},
                    {"ubm_components", model.ubm().num_components()},
                    {"tv_rank", model.tv().rank()},
                    {"seed", options.seed},
                    {"score", "max cosine over enrollment i-vectors"}};
  return r;
}

EvalReport EvaluateFr(const FrEvalOptions &options) {
  if (options.identities < 2) Fail(ErrorCode::kInvalidArgument, "evaluation needs at least two identities");
  const face::ToyExtractor extractor;
  face::FaceOptions fopts;
  fopts.min_seconds = std::min(fopts.min_seconds, options.enroll_seconds);
  std::vector<std::vector<FaceEmbedding>> enrolled, probes;
  for (int i = 0; i < options.identities; ++i) {
    const auto profile = synth::RandomFace(synth::DeriveSeed(options.seed, static_cast<std::uint64_t>(i)));
    const auto video = synth::SynthFaceVideo(profile, options.enroll_seconds, options.fps, kEnroll);
    enrolled.push_back(face::EmbedEnrollment(video, extractor, fopts));
    for (int p = 0; p < options.probes_per_identity; ++p) {
      const auto clip = synth::SynthFaceVideo(profile, options.probe_seconds, options.fps,
                                              synth::DeriveSeed(kProbe, static_cast<std::uint64_t>(p)));
      std::vector<FaceEmbedding> emb;
      for (const auto &f : clip.frames) emb.push_back(extractor.Embed(f));
      probes.push_back(std::move(emb));
    }
  }
  std::vector<double> genuine, impostor;
  for (std::size_t m = 0; m < enrolled.size(); ++m) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto outcome = face::ScoreFace(enrolled[m], probes[p], 0.0);
      const bool same = p / static_cast<std::size_t>(options.probes_per_identity) == m;
      (same ? genuine : impostor).push_back(Mean(outcome.item_scores));
    }
  }
  EvalReport r = MakeReport(Instrument::kFR, std::move(genuine), std::move(impostor));
  r.settings = Json{{"identities", options.identities},
                    {"enroll_seconds", options.enroll_seconds},
                    {"fps", options.fps},
                    {"probes_per_identity", options.probes_per_identity},
                    {"probe_seconds", options.probe_seconds},
                    {"seed", options.seed},
                    {"score", "mean per-frame best cosine"}};
  return r;
}

FraCorpus BuildFraCorpus(const FraEvalOptions &options) {
  if (options.identities < 2) Fail(ErrorCode::kInvalidArgument, "FRA corpus needs at least two identities");
  std::vector<synth::SyntheticFaceProfile> faces;
  for (int i = 0; i < options.identities; ++i) {
    faces.push_back(synth::RandomFace(synth::DeriveSeed(options.seed, static_cast<std::uint64_t>(i))));
  }
  const std::size_t half = faces.size() / 2;
  auto frames = [&](int count, bool train, bool attack, Tag tag) {
    std::vector<image::FrameImage> out;
    const std::size_t offset = train ? 0 : half;
    const std::size_t pool = train ? half : faces.size() - half;
    for (int k = 0; k < count; ++k) {
      const auto &profile = faces[offset + static_cast<std::size_t>(k) % pool];
      auto img = synth::SynthFace(profile, synth::DeriveSeed(options.seed, tag, static_cast<std::uint64_t>(k)));
      if (attack) {
        synth::RecaptureOptions ro;
        ro.seed = synth::DeriveSeed(options.seed, kAttackChannel, tag, static_cast<std::uint64_t>(k));
        img = synth::SimulateRecaptureFace(img, ro);
      }
      out.push_back(std::move(img));
    }
    return out;
  };
  FraCorpus c;
  c.train_bona_fide = frames(options.train_bona_fide, true, false, kTrainBona);
  c.train_attack = frames(options.train_attack, true, true, kTrainAttack);
  c.test_bona_fide = frames(options.test_bona_fide, false, false, kTestBona);
  c.test_attack = frames(options.test_attack, false, true, kTestAttack);
  return c;
}

pad::LinearPadModel TrainFraModel(const FraCorpus &corpus, const pad::PadTrainOptions &training) {
  std::vector<pad::LabeledIqm> data;
  for (const auto &f : corpus.train_bona_fide) data.push_back({pad::FrameIqms(f, training.reference_sigma), true});
  for (const auto &f : corpus.train_attack) data.push_back({pad::FrameIqms(f, training.reference_sigma), false});
  return pad::TrainPadClassifier(data, training).model;
}

namespace {

EvalReport PadReport(Instrument instrument, std::vector<double> bona_fide, std::vector<double> attack) {
  std::vector<bool> attack_ok, bona_ok;
  for (double s : attack) attack_ok.push_back(s > 0);
  for (double s : bona_fide) bona_ok.push_back(s > 0);
  const auto rates = metrics::ComputeAcer(attack_ok, bona_ok);
  EvalReport r = MakeReport(instrument, std::move(bona_fide), std::move(attack));
  r.pad = rates;
  return r;
}

}  // namespace

EvalReport EvaluateFra(const FraCorpus &corpus, const pad::LinearPadModel &model) {
  std::vector<double> bona, attack;
  for (const auto &f : corpus.test_bona_fide) bona.push_back(pad::ClassifyFacePad(model, {&f, 1}).score);
  for (const auto &f : corpus.test_attack) attack.push_back(pad::ClassifyFacePad(model, {&f, 1}).score);
  return PadReport(Instrument::kFRA, std::move(bona), std::move(attack));
}

EvalReport EvaluateFra(const FraEvalOptions &options) {
  const FraCorpus corpus = BuildFraCorpus(options);
  EvalReport r = EvaluateFra(corpus, TrainFraModel(corpus, options.training));
  r.settings = Json{{"train_bona_fide", options.train_bona_fide}, {"train_attack", options.train_attack},
                    {"test_bona_fide", options.test_bona_fide},   {"test_attack", options.test_attack},
                    {"identities", options.identities},           {"seed", options.seed}};
  return r;
}

VraCorpus BuildVraCorpus(const VraEvalOptions &options) {
  if (options.train_speakers < 1 || options.test_speakers < 1) {
    Fail(ErrorCode::kInvalidArgument, "VRA corpus needs training and test speakers");
  }
  const int sr = options.frontend.sample_rate;
  auto speakers = [&](int count, Tag tag) {
    std::vector<synth::SyntheticSpeakerProfile> out;
    for (int s = 0; s < count; ++s) {
      out.push_back(synth::RandomSpeaker(synth::DeriveSeed(options.seed, tag, static_cast<std::uint64_t>(s)), sr));
    }
    return out;
  };
  const auto train = speakers(options.train_speakers, kTrainSpeakers);
  const auto calibration = speakers(std::max(1, options.calibration_speakers), kCalibrationSpeakers);
  const auto test = speakers(options.test_speakers, kTestSpeakers);
  auto utterances = [&](const std::vector<synth::SyntheticSpeakerProfile> &pool, int count, Tag tag) {
    std::vector<audio::AudioBuffer> out;
    for (int k = 0; k < count; ++k) {
      out.push_back(synth::SynthVoice(pool[static_cast<std::size_t>(k) % pool.size()], options.seconds,
                                      synth::DeriveSeed(options.seed, tag, static_cast<std::uint64_t>(k))));
    }
    return out;
  };
  VraCorpus c;
  c.train_bona_fide = utterances(train, options.train_bona_fide, kTrainBona);
  c.calibration_bona_fide = utterances(calibration, options.calibration_bona_fide, kCalibration);
  c.test_bona_fide = utterances(test, options.test_bona_fide, kTestBona);
  std::vector<audio::AudioBuffer> sources = utterances(test, options.test_attack, kTestAttack);
  for (std::size_t k = 0; k < sources.size(); ++k) {
    synth::ReplayOptions ro;
    ro.seed = synth::DeriveSeed(options.seed, kAttackChannel, k);
    c.test_attack.push_back(synth::SimulateReplayVoice(sources[k], ro));
  }
  return c;
}

EvalReport EvaluateVra(const VraCorpus &corpus, const pad::OccGmm &model) {
  std::vector<double> bona, attack;
  for (const auto &b : corpus.test_bona_fide) bona.push_back(pad::ScoreVoicePad(model, b).score);
  for (const auto &b : corpus.test_attack) attack.push_back(pad::ScoreVoicePad(model, b).score);
  return PadReport(Instrument::kVRA, std::move(bona), std::move(attack));
}

pad::OccGmm TrainVraModel(const VraCorpus &corpus, const VraEvalOptions &options) {
  pad::OccGmm model = pad::TrainOcc(corpus.train_bona_fide, options.frontend, options.occ);
  if (!corpus.calibration_bona_fide.empty()) {
    pad::RecalibrateOcc(model, corpus.calibration_bona_fide, options.target_bpcer);
  }
  return model;
}

EvalReport EvaluateVra(const VraEvalOptions &options) {
  const VraCorpus corpus = BuildVraCorpus(options);
  const pad::OccGmm model = TrainVraModel(corpus, options);
  EvalReport r = EvaluateVra(corpus, model);
  r.settings = Json{{"train_bona_fide", options.train_bona_fide}, {"test_bona_fide", options.test_bona_fide},
                    {"test_attack", options.test_attack},         {"seconds", options.seconds},
                    {"calibration_bona_fide", options.calibration_bona_fide},
                    {"target_bpcer", options.target_bpcer},
                    {"components", options.occ.num_components},   {"seed", options.seed}};
  return r;
}

}  // namespace trustauth::eval
