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

// trustauth: command-line front door. Every subcommand goes through the same
// Engine the HTTP service uses. Exit codes: 0 success, 1 domain error,
// 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trustauth/engine.hpp"
#include "trustauth/error.hpp"
#include "trustauth/evaluate.hpp"
#include "trustauth/fixture.hpp"
#include "trustauth/metrics.hpp"
#include "trustauth/synth.hpp"
#include "trustauth/wav.hpp"

namespace fs = std::filesystem;
using namespace trustauth;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Bytes ReadBytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) Fail(ErrorCode::kStorage, "cannot read " + p.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void WriteBytes(const fs::path &p, std::string_view data) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) Fail(ErrorCode::kStorage, "cannot write " + p.string());
}

void WriteBytes(const fs::path &p, const Bytes &b) {
  WriteBytes(p, std::string_view(reinterpret_cast<const char *>(b.data()), b.size()));
}

void PrintJson(const Json &j) { std::cout << j.dump(2) << "\n"; }

struct Globals {
  std::string config;
  std::string data_dir;
};

ServiceConfig ResolveConfig(const Globals &g) {
  ServiceConfig c;
  if (!g.config.empty()) {
    c = LoadConfig(g.config);
  } else {
    ApplyEnvironment(c);
  }
  if (!g.data_dir.empty()) c.data_dir = g.data_dir;
  c.Validate();
  return c;
}

// Raw config document for in-place edits (thresholds, model paths), so
// relative paths survive the round trip.
Json RawConfig(const fs::path &path) {
  if (path.empty()) throw UsageError("--config is required for this command");
  if (!fs::exists(path)) return Json::object();
  return ReadJsonFile(path);
}

Submission MakeSubmission(const std::string &sample, const std::string &session, const std::string &at,
                          const std::string &activity) {
  Submission s;
  s.payload = ReadBytes(sample);
  if (!session.empty()) s.session_id = session;
  if (!at.empty()) s.captured_at = ParseTimestamp(at);
  s.activity_id = activity;
  return s;
}

Instrument VerificationInstrument(const std::string &name) {
  const Instrument i = ParseInstrument(name);
  if (i != Instrument::kVR && i != Instrument::kFR && i != Instrument::kKD) {
    Fail(ErrorCode::kInvalidArgument, "calibration applies to VR, FR and KD only");
  }
  return i;
}

struct EvalArgs {
  std::string instrument;
  int count = 0;  // 0 keeps the instrument's default population
  std::uint64_t seed = 1;
  std::string model;
};

eval::EvalReport RunEvaluation(const EvalArgs &a, const ServiceConfig &cfg) {
  const Instrument inst = ParseInstrument(a.instrument);
  switch (inst) {
    case Instrument::kKD: {
      eval::KdEvalOptions o;
      if (a.count > 0) o.typists = a.count;
      o.seed = a.seed;
      return eval::EvaluateKd(o);
    }
    case Instrument::kVR: {
      eval::VrEvalOptions o;
      if (a.count > 0) o.speakers = a.count;
      o.seed = a.seed;
      o.system.frontend = cfg.frontend;
      fs::path model = a.model;
      if (model.empty() && !cfg.models.voice.empty() && fs::exists(cfg.models.voice)) model = cfg.models.voice;
      if (!model.empty()) return eval::EvaluateVr(o, SpeakerModelFromJson(ReadJsonFile(model)));
      return eval::EvaluateVr(o);
    }
    case Instrument::kFR: {
      eval::FrEvalOptions o;
      if (a.count > 0) o.identities = a.count;
      o.seed = a.seed;
      return eval::EvaluateFr(o);
    }
    case Instrument::kFRA: {
      eval::FraEvalOptions o;
      if (a.count > 0) o.identities = a.count;
      o.seed = a.seed;
      return eval::EvaluateFra(o);
    }
    case Instrument::kVRA: {
      eval::VraEvalOptions o;
      if (a.count > 0) o.train_speakers = a.count;
      o.seed = a.seed;
      o.frontend = cfg.frontend;
      return eval::EvaluateVra(o);
    }
  }
  Fail(ErrorCode::kInvalidArgument, "unknown instrument");
}

image::FrameSequence RecaptureSequence(const image::FrameSequence &in, std::uint64_t seed) {
  image::FrameSequence out{{}, in.fps};
  for (std::size_t k = 0; k < in.frames.size(); ++k) {
    synth::RecaptureOptions o;
    o.seed = synth::DeriveSeed(seed, k);
    out.frames.push_back(synth::SimulateRecaptureFace(in.frames[k], o));
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"trustauth: biometric enrollment, verification, PAD and trust reports"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "service config JSON");
  app.add_option("--data-dir", g.data_dir, "override the data directory");

  // enroll
  std::string en_learner, en_name, en_modality;
  std::vector<std::string> en_samples, en_sessions, en_at;
  auto *enroll = app.add_subcommand("enroll", "submit enrollment samples; finalizes once the policy is met");
  auto *en_learner_opt = enroll->add_option("--learner", en_learner, "learner id");
  enroll->add_option("--name", en_name, "register a new learner with this display name")->excludes(en_learner_opt);
  enroll->add_option("--modality", en_modality, "voice | face | keystroke")->required();
  enroll->add_option("--sample", en_samples, "sample file (repeatable)")->required()->check(CLI::ExistingFile);
  enroll->add_option("--session", en_sessions, "session id, once or once per sample");
  enroll->add_option("--captured-at", en_at, "capture time, ISO-8601 UTC; once or once per sample");

  // verify
  std::string ve_learner, ve_modality, ve_sample, ve_activity, ve_at;
  auto *verify = app.add_subcommand("verify", "verify a probe against a claimed learner");
  verify->add_option("--learner", ve_learner, "claimed learner id")->required();
  verify->add_option("--modality", ve_modality, "voice | face | keystroke")->required();
  verify->add_option("--sample", ve_sample, "probe file")->required()->check(CLI::ExistingFile);
  verify->add_option("--activity", ve_activity, "record the result in this activity");
  verify->add_option("--captured-at", ve_at, "capture time, ISO-8601 UTC");

  // pad
  std::string pa_learner, pa_modality, pa_sample, pa_activity, pa_at;
  auto *pad = app.add_subcommand("pad", "presentation attack detection on a probe");
  pad->add_option("--modality", pa_modality, "voice | face")->required();
  pad->add_option("--sample", pa_sample, "probe file")->required()->check(CLI::ExistingFile);
  pad->add_option("--learner", pa_learner, "learner the probe was presented for");
  pad->add_option("--activity", pa_activity, "record the result in this activity");
  pad->add_option("--captured-at", pa_at, "capture time, ISO-8601 UTC");

  // report
  std::string re_activity, re_learner, re_out;
  bool re_stored = false;
  auto *report = app.add_subcommand("report", "build the trust report of an activity");
  report->add_option("--activity", re_activity, "activity id")->required();
  report->add_option("--learner", re_learner, "learner id, when no verification named one");
  report->add_option("--out", re_out, "also write the report here");
  report->add_flag("--stored", re_stored, "print the last built report instead of rebuilding");

  // simulate
  auto *simulate = app.add_subcommand("simulate", "write synthetic samples and attack transforms");
  simulate->require_subcommand(1);
  std::uint64_t si_seed = 1, si_profile_seed = 1;
  double si_seconds = 3.0, si_fps = 10.0;
  int si_rate = 16000, si_typists = 20, si_typist = 0, si_keys = 150;
  std::string si_in, si_out, si_manifest;
  auto *sim_voice = simulate->add_subcommand("voice", "synthetic utterance (WAV)");
  sim_voice->add_option("--speaker-seed", si_profile_seed, "speaker profile seed");
  sim_voice->add_option("--seed", si_seed, "utterance seed");
  sim_voice->add_option("--seconds", si_seconds, "duration, at least 1 s");
  sim_voice->add_option("--sample-rate", si_rate, "Hz");
  sim_voice->add_option("--out", si_out, "output WAV")->required();
  auto *sim_face = simulate->add_subcommand("face", "synthetic face video (frame-sequence JSON)");
  sim_face->add_option("--face-seed", si_profile_seed, "face profile seed");
  sim_face->add_option("--seed", si_seed, "capture seed");
  sim_face->add_option("--seconds", si_seconds, "duration");
  sim_face->add_option("--fps", si_fps, "frames per second");
  sim_face->add_option("--out", si_out, "output file")->required();
  auto *sim_typing = simulate->add_subcommand("typing", "synthetic keystroke stream (JSON lines)");
  sim_typing->add_option("--population-seed", si_profile_seed, "typist population seed");
  sim_typing->add_option("--typists", si_typists, "population size");
  sim_typing->add_option("--typist", si_typist, "index into the population");
  sim_typing->add_option("--keystrokes", si_keys, "stream length");
  sim_typing->add_option("--seed", si_seed, "stream seed");
  sim_typing->add_option("--out", si_out, "output file")->required();
  auto *sim_replay = simulate->add_subcommand("replay", "replay channel applied to a WAV");
  sim_replay->add_option("--in", si_in, "input WAV")->required()->check(CLI::ExistingFile);
  sim_replay->add_option("--seed", si_seed, "channel noise seed");
  sim_replay->add_option("--out", si_out, "output WAV")->required();
  auto *sim_recapture = simulate->add_subcommand("recapture", "recapture channel applied to face frames");
  sim_recapture->add_option("--in", si_in, "frame sequence or PGM")->required()->check(CLI::ExistingFile);
  sim_recapture->add_option("--seed", si_seed, "channel noise seed");
  sim_recapture->add_option("--out", si_out, "output frame sequence")->required();
  auto *sim_fixture = simulate->add_subcommand("fixture", "regenerate the end-to-end fixture from its manifest");
  sim_fixture->add_option("--manifest", si_manifest, "manifest JSON")->required()->check(CLI::ExistingFile);
  sim_fixture->add_option("--out", si_out, "output directory")->required();

  // evaluate
  EvalArgs ev;
  std::string ev_out, ev_csv;
  auto *evaluate = app.add_subcommand("evaluate", "synthetic-population error rates for one instrument");
  evaluate->add_option("--instrument", ev.instrument, "kd | vr | fr | fra | vra")->required();
  evaluate->add_option("--speakers", ev.count, "population size (speakers, typists or identities)");
  evaluate->add_option("--seed", ev.seed, "root seed");
  evaluate->add_option("--model", ev.model, "speaker model bundle for vr");
  evaluate->add_option("--out", ev_out, "also write the JSON report here");
  evaluate->add_option("--det-csv", ev_csv, "write DET points as CSV");

  // calibrate
  EvalArgs ca;
  std::string ca_target = "eer";
  double ca_value = 0.0;
  auto *calibrate = app.add_subcommand("calibrate", "set an instrument threshold from a synthetic evaluation");
  calibrate->add_option("--instrument", ca.instrument, "vr | fr | kd")->required();
  calibrate->add_option("--target", ca_target, "eer | far_at | frr_at");
  calibrate->add_option("--value", ca_value, "target rate for far_at / frr_at");
  calibrate->add_option("--speakers", ca.count, "population size");
  calibrate->add_option("--seed", ca.seed, "root seed");
  calibrate->add_option("--model", ca.model, "speaker model bundle for vr");

  // train
  std::string tr_model, tr_out;
  std::uint64_t tr_seed = 1;
  auto *train = app.add_subcommand("train", "train a model bundle on synthetic data");
  train->add_option("--model", tr_model, "voice | vra | fra")->required()->check(CLI::IsMember({"voice", "vra", "fra"}));
  train->add_option("--out", tr_out, "output JSON")->required();
  train->add_option("--seed", tr_seed, "root seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*enroll) {
      ServiceConfig cfg = ResolveConfig(g);
      Engine engine(cfg);
      if (en_learner.empty() && en_name.empty()) throw UsageError("enroll needs --learner or --name");
      if (en_sessions.size() > 1 && en_sessions.size() != en_samples.size()) {
        throw UsageError("give --session once or once per --sample");
      }
      if (en_at.size() > 1 && en_at.size() != en_samples.size()) {
        throw UsageError("give --captured-at once or once per --sample");
      }
      const Modality m = ParseModality(en_modality);
      if (en_learner.empty()) en_learner = engine.RegisterLearner(en_name).id;
      Json results = Json::array();
      for (std::size_t i = 0; i < en_samples.size(); ++i) {
        const std::string session = en_sessions.empty() ? "" : en_sessions.size() == 1 ? en_sessions[0] : en_sessions[i];
        const std::string at = en_at.empty() ? "" : en_at.size() == 1 ? en_at[0] : en_at[i];
        results.push_back(engine.Enroll(en_learner, m, MakeSubmission(en_samples[i], session, at, "")));
      }
      PrintJson(Json{{"identity", en_learner}, {"results", results}});
    } else if (*verify) {
      Engine engine(ResolveConfig(g));
      PrintJson(engine.Verify(ve_learner, ParseModality(ve_modality), MakeSubmission(ve_sample, "", ve_at, ve_activity)));
    } else if (*pad) {
      Engine engine(ResolveConfig(g));
      PrintJson(engine.Pad(ParseModality(pa_modality), MakeSubmission(pa_sample, "", pa_at, pa_activity), pa_learner));
    } else if (*report) {
      Engine engine(ResolveConfig(g));
      const std::string text =
          re_stored ? engine.StoredReport(re_activity) : trust::SerializeReport(engine.BuildReport(re_activity, re_learner));
      if (!re_out.empty()) WriteBytes(re_out, text);
      std::cout << text;
    } else if (*simulate) {
      if (*sim_voice) {
        const auto profile = synth::RandomSpeaker(si_profile_seed, si_rate);
        audio::WriteWav(si_out, synth::SynthVoice(profile, si_seconds, si_seed));
      } else if (*sim_face) {
        const auto profile = synth::RandomFace(si_profile_seed);
        WriteBytes(si_out, image::EncodeFrameSequence(synth::SynthFaceVideo(profile, si_seconds, si_fps, si_seed)));
      } else if (*sim_typing) {
        if (si_typist < 0 || si_typist >= si_typists) throw UsageError("--typist must index into the population");
        const auto typists = synth::TypistPopulation(si_typists, si_profile_seed);
        WriteBytes(si_out, keystroke::FormatKeyEventsJsonl(
                               synth::SynthTyping(typists[static_cast<std::size_t>(si_typist)], si_keys, si_seed)));
      } else if (*sim_replay) {
        synth::ReplayOptions o;
        o.seed = si_seed;
        audio::WriteWav(si_out, synth::SimulateReplayVoice(audio::ReadWav(si_in), o));
      } else if (*sim_recapture) {
        WriteBytes(si_out, image::EncodeFrameSequence(RecaptureSequence(DecodeFace(ReadBytes(si_in)), si_seed)));
      } else if (*sim_fixture) {
        const auto manifest = ReadJsonFile(si_manifest).get<fixture::FixtureManifest>();
        PrintJson(fixture::GenerateFixture(manifest, si_out));
        return 0;
      }
      PrintJson(Json{{"written", si_out}});
    } else if (*evaluate) {
      const auto r = RunEvaluation(ev, ResolveConfig(g));
      const Json j = r.ToJson();
      if (!ev_out.empty()) WriteBytes(ev_out, j.dump(2) + "\n");
      if (!ev_csv.empty()) WriteBytes(ev_csv, r.DetCsv());
      PrintJson(j);
    } else if (*calibrate) {
      Json raw = RawConfig(g.config);
      const Instrument inst = VerificationInstrument(ca.instrument);
      const ServiceConfig cfg = ResolveConfig(Globals{fs::exists(g.config) ? g.config : "", g.data_dir});
      const auto r = RunEvaluation(ca, cfg);
      const double t = metrics::CalibrateThreshold(r.genuine, r.impostor, metrics::ParseCalibrationTarget(ca_target),
                                                   ca_value);
      // KD evaluations score -distance; the instrument threshold is a distance.
      const double threshold = inst == Instrument::kKD ? -t : t;
      raw["thresholds"][std::string(ToString(inst))] = threshold;
      ConfigFromJson(raw, fs::path(g.config).parent_path()).Validate();
      WriteJsonFile(g.config, raw);
      const auto at = metrics::RatesAt(r.genuine, r.impostor, t);
      PrintJson(Json{{"instrument", ToString(inst)},
                     {"target", ca_target},
                     {"value", ca_value},
                     {"threshold", threshold},
                     {"far", at.far},
                     {"frr", at.frr},
                     {"config", g.config}});
    } else if (*train) {
      const ServiceConfig cfg = ResolveConfig(Globals{g.config.empty() || !fs::exists(g.config) ? "" : g.config,
                                                      g.data_dir});
      Json model;
      if (tr_model == "voice") {
        eval::VoiceSystemOptions o;
        o.frontend = cfg.frontend;
        o.seed = tr_seed;
        model = SpeakerModelToJson(eval::TrainVoiceSystem(o));
      } else if (tr_model == "vra") {
        eval::VraEvalOptions o;
        o.frontend = cfg.frontend;
        o.seed = tr_seed;
        model = eval::TrainVraModel(eval::BuildVraCorpus(o), o);
      } else {
        eval::FraEvalOptions o;
        o.seed = tr_seed;
        o.training.seed = tr_seed;
        model = eval::TrainFraModel(eval::BuildFraCorpus(o), o.training);
      }
      WriteJsonFile(tr_out, model);
      if (!g.config.empty()) {
        Json raw = RawConfig(g.config);
        const fs::path base = fs::absolute(g.config).parent_path();
        raw["models"][tr_model] = fs::absolute(tr_out).lexically_relative(base).string();
        WriteJsonFile(g.config, raw);
      }
      PrintJson(Json{{"model", tr_model}, {"written", tr_out}});
    }
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const Error &e) {
    std::cerr << Json{{"error", {{"code", ErrorCodeName(e.code())}, {"message", e.detail()}}}}.dump() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << Json{{"error", {{"code", "InternalError"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 0;
}
