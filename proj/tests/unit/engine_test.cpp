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

#include <cstdlib>

#include <gtest/gtest.h>

#include "scratch.hpp"
#include "trustauth/engine.hpp"
#include "trustauth/error.hpp"
#include "trustauth/synth.hpp"

namespace trustauth {
namespace {

using testing_support::ScratchDir;

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kStorage;
}

ServiceConfig Config(const ScratchDir &dir) {
  ServiceConfig c;
  c.data_dir = dir / "data";
  return c;
}

Submission Face(std::uint64_t face_seed, double seconds, std::uint64_t capture_seed, std::string activity = {}) {
  const auto video = synth::SynthFaceVideo(synth::RandomFace(face_seed), seconds, 10.0, capture_seed);
  Submission s;
  s.payload = image::EncodeFrameSequence(video);
  s.captured_at = ParseTimestamp("2026-03-02T09:00:00.000000Z");
  s.activity_id = std::move(activity);
  return s;
}

Submission Typing(int n, std::uint64_t seed, std::string activity = {}) {
  const auto typist = synth::TypistPopulation(4, 21).front();
  Submission s;
  s.payload = ToBytes(keystroke::FormatKeyEventsJsonl(synth::SynthTyping(typist, n, seed)));
  s.captured_at = ParseTimestamp("2026-03-02T09:00:00.000000Z");
  s.activity_id = std::move(activity);
  return s;
}

TEST(Engine, ModelFreeInstruments) {
  ScratchDir dir("engine");
  Engine engine(Config(dir));
  const auto inst = engine.AvailableInstruments();
  EXPECT_EQ(inst, (std::vector<Instrument>{Instrument::kFR, Instrument::kKD}));
  const std::string id = engine.RegisterLearner("ann").id;
  Submission voice;
  voice.payload = Bytes{1, 2, 3};
  EXPECT_EQ(CodeOf([&] { engine.Enroll(id, Modality::kVoice, voice); }), ErrorCode::kInstrumentUnavailable);
}

TEST(Engine, EnrollVerifyReportAndRestart) {
  ScratchDir dir("engine");
  std::string id, report;
  {
    Engine engine(Config(dir));
    id = engine.RegisterLearner("ann").id;
    const EnrollResult face = engine.Enroll(id, Modality::kFace, Face(1, 5.0, 10));
    EXPECT_TRUE(face.status.complete);
    EXPECT_EQ(face.templates, 10u);
    const EnrollResult keys = engine.Enroll(id, Modality::kKeystroke, Typing(750, 1));
    EXPECT_TRUE(keys.status.complete);
    EXPECT_EQ(CodeOf([&] { engine.Enroll(id, Modality::kFace, Face(1, 5.0, 11)); }), ErrorCode::kAlreadyEnrolled);

    const auto fr = engine.Verify(id, Modality::kFace, Face(1, 1.0, 12, "act-1"));
    EXPECT_TRUE(std::get<VerificationOutcome>(fr.outcome).accepted);
    EXPECT_EQ(std::get<VerificationOutcome>(fr.outcome).threshold, engine.config().threshold(Instrument::kFR));
    const auto kd = engine.Verify(id, Modality::kKeystroke, Typing(150, 2, "act-1"));
    EXPECT_TRUE(std::get<VerificationOutcome>(kd.outcome).accepted);
    EXPECT_EQ(engine.ActivityResults("act-1").size(), 2u);

    const trust::TrustReport r = engine.BuildReport("act-1");
    EXPECT_EQ(r.decision, trust::TrustDecision::kTrusted);
    EXPECT_EQ(r.identity, id);
    report = engine.StoredReport("act-1");
    EXPECT_EQ(report, trust::SerializeReport(r));
  }
  Engine reopened(Config(dir));
  EXPECT_EQ(reopened.StoredReport("act-1"), report);
  EXPECT_TRUE(reopened.registry().IsEnrolled(id, Modality::kFace));
  EXPECT_EQ(trust::SerializeReport(reopened.BuildReport("act-1")), report);
}

TEST(Engine, ActivityErrors) {
  ScratchDir dir("engine");
  Engine engine(Config(dir));
  EXPECT_EQ(CodeOf([&] { engine.StoredReport("nothing"); }), ErrorCode::kUnknownActivity);
  EXPECT_EQ(CodeOf([&] { engine.BuildReport("nothing"); }), ErrorCode::kUnknownActivity);
  EXPECT_EQ(CodeOf([&] { engine.ActivityResults("nothing"); }), ErrorCode::kUnknownActivity);
  EXPECT_EQ(CodeOf([&] { engine.StoredReport("../escape"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { engine.Verify("nobody", Modality::kFace, Face(1, 1.0, 1)); }), ErrorCode::kUnknownIdentity);
  EXPECT_EQ(CodeOf([&] { engine.Pad(Modality::kKeystroke, Typing(150, 1)); }), ErrorCode::kInvalidArgument);
}

TEST(Engine, ActivityBelongsToOneLearner) {
  ScratchDir dir("engine");
  Engine engine(Config(dir));
  const std::string a = engine.RegisterLearner("a").id, b = engine.RegisterLearner("b").id;
  engine.Enroll(a, Modality::kKeystroke, Typing(750, 1));
  engine.Enroll(b, Modality::kKeystroke, Typing(750, 2));
  engine.Verify(a, Modality::kKeystroke, Typing(150, 3, "shared"));
  EXPECT_EQ(CodeOf([&] { engine.Verify(b, Modality::kKeystroke, Typing(150, 4, "shared")); }),
            ErrorCode::kInvalidArgument);
}

TEST(Config, JsonRoundTripAndThresholdOverride) {
  ScratchDir dir("config");
  ServiceConfig c = Config(dir);
  c.thresholds[Instrument::kKD] = 2.25;
  SaveConfig(dir / "cfg.json", c);
  const ServiceConfig back = LoadConfig(dir / "cfg.json");
  EXPECT_EQ(back.threshold(Instrument::kKD), 2.25);
  EXPECT_EQ(back.data_dir, c.data_dir);
  EXPECT_EQ(Json(back), Json(c));

  // A stricter KD threshold takes effect on the next verification.
  Engine engine(back);
  const std::string id = engine.RegisterLearner("ann").id;
  engine.Enroll(id, Modality::kKeystroke, Typing(750, 1));
  EXPECT_EQ(std::get<VerificationOutcome>(engine.Verify(id, Modality::kKeystroke, Typing(150, 2)).outcome).threshold, 2.25);
}

TEST(Config, EnvironmentOverridesFile) {
  ScratchDir dir("config");
  SaveConfig(dir / "cfg.json", Config(dir));
  ::setenv(kListenEnv, "0.0.0.0:9999", 1);
  ::setenv(kDataDirEnv, (dir / "elsewhere").c_str(), 1);
  const ServiceConfig c = LoadConfig(dir / "cfg.json");
  ::unsetenv(kListenEnv);
  ::unsetenv(kDataDirEnv);
  EXPECT_EQ(c.listen, "0.0.0.0:9999");
  EXPECT_EQ(c.data_dir, dir / "elsewhere");
}

TEST(Config, RejectsBadValues) {
  EXPECT_EQ(CodeOf([] { ConfigFromJson(Json::array()); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ConfigFromJson(Json{{"listen", "nope"}}).Validate(); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ConfigFromJson(Json{{"fusion", {{"weights", {{"FR", -1.0}}}}}}); }), ErrorCode::kConfig);
  ScratchDir dir("config");
  EXPECT_EQ(CodeOf([&] { LoadConfig(dir / "missing.json"); }), ErrorCode::kConfig);
}

}  // namespace
}  // namespace trustauth
