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

#include "trustauth/fixture.hpp"

#include <chrono>
#include <fstream>

#include "trustauth/error.hpp"
#include "trustauth/image.hpp"
#include "trustauth/keystroke.hpp"
#include "trustauth/synth.hpp"
#include "trustauth/wav.hpp"

namespace trustauth::fixture {
namespace fs = std::filesystem;

namespace {

enum Tag : std::uint64_t { kSpeaker = 1, kFace, kTypists, kVoiceEnroll, kVoiceProbe, kFaceEnroll, kFaceProbe,
                           kTypingEnroll, kTypingProbe, kReplay, kRecapture };

void WriteBytes(const fs::path &p, const Bytes &b) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char *>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) Fail(ErrorCode::kStorage, "cannot write " + p.string());
}

}  // namespace

void to_json(Json &j, const FixtureManifest &m) {
  j = Json{{"seed", m.seed},
           {"sample_rate", m.sample_rate},
           {"display_name", m.display_name},
           {"captured_at", m.captured_at},
           {"voice_enroll_samples", m.voice_enroll_samples},
           {"voice_sessions", m.voice_sessions},
           {"voice_enroll_seconds", m.voice_enroll_seconds},
           {"voice_probe_seconds", m.voice_probe_seconds},
           {"face_enroll_seconds", m.face_enroll_seconds},
           {"face_probe_seconds", m.face_probe_seconds},
           {"fps", m.fps},
           {"typists", m.typists},
           {"typing_enroll", m.typing_enroll},
           {"typing_probe", m.typing_probe}};
}

void from_json(const Json &j, FixtureManifest &m) {
  m = FixtureManifest{};
  m.seed = j.value("seed", m.seed);
  m.sample_rate = j.value("sample_rate", m.sample_rate);
  m.display_name = j.value("display_name", m.display_name);
  m.captured_at = j.value("captured_at", m.captured_at);
  m.voice_enroll_samples = j.value("voice_enroll_samples", m.voice_enroll_samples);
  m.voice_sessions = j.value("voice_sessions", m.voice_sessions);
  m.voice_enroll_seconds = j.value("voice_enroll_seconds", m.voice_enroll_seconds);
  m.voice_probe_seconds = j.value("voice_probe_seconds", m.voice_probe_seconds);
  m.face_enroll_seconds = j.value("face_enroll_seconds", m.face_enroll_seconds);
  m.face_probe_seconds = j.value("face_probe_seconds", m.face_probe_seconds);
  m.fps = j.value("fps", m.fps);
  m.typists = j.value("typists", m.typists);
  m.typing_enroll = j.value("typing_enroll", m.typing_enroll);
  m.typing_probe = j.value("typing_probe", m.typing_probe);
  if (m.voice_enroll_samples < 1 || m.voice_sessions < 1 || m.typists < 1 || !(m.fps > 0)) {
    Fail(ErrorCode::kInvalidArgument, "fixture manifest counts must be positive");
  }
  ParseTimestamp(m.captured_at);
}

void to_json(Json &j, const FixtureIndex &x) {
  auto file = [](const EnrollFile &f) {
    return Json{{"path", f.path}, {"session_id", f.session_id}, {"captured_at", f.captured_at}};
  };
  Json voice = Json::array();
  for (const auto &f : x.voice_enroll) voice.push_back(file(f));
  j = Json{{"display_name", x.display_name},
           {"captured_at", x.captured_at},
           {"enroll", {{"voice", voice}, {"face", file(x.face_enroll)}, {"keystroke", file(x.typing_enroll)}}},
           {"probe", {{"voice", x.voice_probe}, {"face", x.face_probe}, {"keystroke", x.typing_probe}}},
           {"attack", {{"voice", x.voice_replay}, {"face", x.face_recapture}}}};
}

void from_json(const Json &j, FixtureIndex &x) {
  auto file = [](const Json &f) {
    return EnrollFile{f.at("path").get<std::string>(), f.at("session_id").get<std::string>(),
                      f.at("captured_at").get<std::string>()};
  };
  x.display_name = j.at("display_name").get<std::string>();
  x.captured_at = j.at("captured_at").get<std::string>();
  x.voice_enroll.clear();
  for (const auto &f : j.at("enroll").at("voice")) x.voice_enroll.push_back(file(f));
  x.face_enroll = file(j.at("enroll").at("face"));
  x.typing_enroll = file(j.at("enroll").at("keystroke"));
  x.voice_probe = j.at("probe").at("voice").get<std::string>();
  x.face_probe = j.at("probe").at("face").get<std::string>();
  x.typing_probe = j.at("probe").at("keystroke").get<std::string>();
  x.voice_replay = j.at("attack").at("voice").get<std::string>();
  x.face_recapture = j.at("attack").at("face").get<std::string>();
}

FixtureIndex GenerateFixture(const FixtureManifest &m, const fs::path &out_dir) {
  using namespace std::chrono;
  const Timestamp probe_at = ParseTimestamp(m.captured_at);
  // Enrollment sessions a week apart, ending a week before the probe.
  auto session_time = [&](int session, int item) {
    return probe_at - days(7 * (m.voice_sessions - session)) + minutes(item);
  };
  const std::uint64_t root = m.seed;
  FixtureIndex x;
  x.display_name = m.display_name;
  x.captured_at = m.captured_at;

  const auto speaker = synth::RandomSpeaker(synth::DeriveSeed(root, kSpeaker), m.sample_rate);
  for (int i = 0; i < m.voice_enroll_samples; ++i) {
    const int session = i * m.voice_sessions / m.voice_enroll_samples;
    const auto buf = synth::SynthVoice(speaker, m.voice_enroll_seconds,
                                       synth::DeriveSeed(root, kVoiceEnroll, static_cast<std::uint64_t>(i)));
    EnrollFile f;
    f.path = "enroll/voice_" + std::to_string(i) + ".wav";
    f.session_id = "s" + std::to_string(session + 1);
    f.captured_at = FormatTimestamp(session_time(session, i));
    WriteBytes(out_dir / f.path, audio::EncodeWav(buf));
    x.voice_enroll.push_back(f);
  }
  const auto voice_probe = synth::SynthVoice(speaker, m.voice_probe_seconds, synth::DeriveSeed(root, kVoiceProbe));
  x.voice_probe = "probe/voice.wav";
  WriteBytes(out_dir / x.voice_probe, audio::EncodeWav(voice_probe));
  synth::ReplayOptions ro;
  ro.seed = synth::DeriveSeed(root, kReplay);
  x.voice_replay = "attack/voice_replay.wav";
  WriteBytes(out_dir / x.voice_replay, audio::EncodeWav(synth::SimulateReplayVoice(voice_probe, ro)));

  const auto face = synth::RandomFace(synth::DeriveSeed(root, kFace));
  const auto enroll_video = synth::SynthFaceVideo(face, m.face_enroll_seconds, m.fps, synth::DeriveSeed(root, kFaceEnroll));
  x.face_enroll = {"enroll/face.json", "s1", FormatTimestamp(session_time(0, 0))};
  WriteBytes(out_dir / x.face_enroll.path, image::EncodeFrameSequence(enroll_video));
  const auto probe_video = synth::SynthFaceVideo(face, m.face_probe_seconds, m.fps, synth::DeriveSeed(root, kFaceProbe));
  x.face_probe = "probe/face.json";
  WriteBytes(out_dir / x.face_probe, image::EncodeFrameSequence(probe_video));
  image::FrameSequence recaptured{{}, probe_video.fps};
  for (std::size_t k = 0; k < probe_video.frames.size(); ++k) {
    synth::RecaptureOptions rc;
    rc.seed = synth::DeriveSeed(root, kRecapture, k);
    recaptured.frames.push_back(synth::SimulateRecaptureFace(probe_video.frames[k], rc));
  }
  x.face_recapture = "attack/face_recapture.json";
  WriteBytes(out_dir / x.face_recapture, image::EncodeFrameSequence(recaptured));

  const auto typists = synth::TypistPopulation(m.typists, synth::DeriveSeed(root, kTypists));
  const auto enroll_keys = synth::SynthTyping(typists.front(), m.typing_enroll, synth::DeriveSeed(root, kTypingEnroll));
  x.typing_enroll = {"enroll/typing.jsonl", "s1", FormatTimestamp(session_time(0, 1))};
  WriteBytes(out_dir / x.typing_enroll.path, ToBytes(keystroke::FormatKeyEventsJsonl(enroll_keys)));
  const auto probe_keys = synth::SynthTyping(typists.front(), m.typing_probe, synth::DeriveSeed(root, kTypingProbe));
  x.typing_probe = "probe/typing.jsonl";
  WriteBytes(out_dir / x.typing_probe, ToBytes(keystroke::FormatKeyEventsJsonl(probe_keys)));

  WriteBytes(out_dir / "index.json", ToBytes(Json(x).dump(2) + "\n"));
  return x;
}

}  // namespace trustauth::fixture
