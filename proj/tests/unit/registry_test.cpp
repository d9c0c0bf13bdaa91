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

#include <fstream>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "scratch.hpp"
#include "trustauth/crypto.hpp"
#include "trustauth/error.hpp"
#include "trustauth/registry.hpp"
#include "trustauth/synth.hpp"

namespace trustauth::registry {
namespace {

using namespace std::chrono;

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kStorage;
}

class RegistryTest : public ::testing::Test {
 protected:
  BiometricSample Voice(const std::string &session, double seconds, Timestamp at) {
    const std::string blob = store_.StoreBlob(ToBytes("voice " + session + std::to_string(counter_++)));
    return {Modality::kVoice, blob, seconds, at, session};
  }

  // One template per sample, whatever the payload.
  static Registry::Trainer KeystrokeTrainer() {
    return [](const std::vector<BiometricSample> &samples) {
      std::vector<TemplateDraft> out;
      for (const auto &s : samples) out.push_back({s.session_id, TypingModel{}});
      return out;
    };
  }
  static Registry::Trainer VoiceTrainer() {
    return [](const std::vector<BiometricSample> &samples) {
      std::vector<TemplateDraft> out;
      for (const auto &s : samples) out.push_back({s.session_id, IVector{Eigen::Vector2d(1, 2), s.payload_ref}});
      return out;
    };
  }

  testing_support::ScratchDir dir_{"registry"};
  Registry store_{dir_.path()};
  int counter_ = 0;
  const Timestamp t0_ = ParseTimestamp("2026-01-05T10:00:00.000000Z");
};

TEST_F(RegistryTest, RegisterLearner) {
  const Identity a = store_.RegisterLearner("alice");
  const Identity b = store_.RegisterLearner("alice");
  EXPECT_EQ(a.display_name, "alice");
  EXPECT_NE(a.id, b.id);
  EXPECT_EQ(store_.GetIdentity(a.id).display_name, "alice");
  EXPECT_EQ(CodeOf([&] { store_.RegisterLearner(""); }), ErrorCode::kInvalidName);
  EXPECT_EQ(CodeOf([&] { store_.RegisterLearner("   "); }), ErrorCode::kInvalidName);
}

TEST_F(RegistryTest, IdsStayUniqueUnderConcurrency) {
  std::vector<std::string> ids(64);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 16; ++i) ids[static_cast<std::size_t>(t * 16 + i)] = store_.RegisterLearner("x").id;
    });
  }
  for (auto &th : threads) th.join();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 64u);
}

TEST_F(RegistryTest, BlobsAreContentAddressed) {
  const Bytes payload = ToBytes("hello");
  const std::string id = store_.StoreBlob(payload);
  EXPECT_EQ(id, Sha256Hex(payload));
  EXPECT_EQ(store_.StoreBlob(payload), id);
  EXPECT_EQ(store_.LoadBlob(id), payload);
}

TEST_F(RegistryTest, VoicePolicyNeedsFifteenOverThree) {
  const auto id = store_.RegisterLearner("v").id;
  EnrollmentStatus st;
  for (int i = 0; i < 14; ++i) st = store_.SubmitEnrollmentSample(id, Voice("s" + std::to_string(i % 3), 12, t0_ + days(2 * (i % 3))));
  EXPECT_FALSE(st.complete);
  EXPECT_EQ(st.sessions, 3u);
  st = store_.SubmitEnrollmentSample(id, Voice("s0", 12, t0_));
  EXPECT_TRUE(st.complete);
  EXPECT_EQ(st.qualifying_samples, 15u);
  EXPECT_TRUE(st.warnings.empty());
}

TEST_F(RegistryTest, ShortSamplesDoNotCountAndSessionsCloseTogetherWarn) {
  const auto id = store_.RegisterLearner("v").id;
  EnrollmentStatus st;
  for (int i = 0; i < 15; ++i) st = store_.SubmitEnrollmentSample(id, Voice("s" + std::to_string(i % 3), 12, t0_ + hours(i % 3)));
  EXPECT_TRUE(st.complete);
  EXPECT_FALSE(st.warnings.empty());
  st = store_.SubmitEnrollmentSample(id, Voice("s3", 4, t0_ + days(9)));
  EXPECT_TRUE(st.complete);
  EXPECT_EQ(st.qualifying_samples, 15u);
  EXPECT_EQ(st.samples, 16u);
}

TEST_F(RegistryTest, PolicyCheckIsExact) {
  synth::Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    EnrollmentPolicy p{Modality::kVoice, static_cast<std::size_t>(rng.UniformInt(1, 6)),
                       static_cast<std::size_t>(rng.UniformInt(1, 3)), rng.Uniform(1, 10)};
    std::vector<BiometricSample> samples;
    const int n = rng.UniformInt(0, 10);
    bool was_complete = false;
    for (int i = 0; i < n; ++i) {
      samples.push_back({Modality::kVoice, "b", rng.Uniform(0.5, 12), t0_ + days(i), "s" + std::to_string(rng.UniformInt(0, 3))});
      const EnrollmentStatus st = EvaluatePolicy(p, samples);
      std::size_t q = 0;
      std::set<std::string> sessions;
      for (const auto &s : samples) {
        if (s.duration_or_count >= p.min_payload) {
          ++q;
          sessions.insert(s.session_id);
        }
      }
      EXPECT_EQ(st.complete, q >= p.min_samples && sessions.size() >= p.min_sessions);
      EXPECT_FALSE(was_complete && !st.complete) << "completeness must be monotone";
      was_complete = st.complete;
    }
  }
}

TEST_F(RegistryTest, KeystrokeStreamCompletes) {
  const auto id = store_.RegisterLearner("k").id;
  const std::string blob = store_.StoreBlob(ToBytes("keys"));
  const auto st = store_.SubmitEnrollmentSample(id, {Modality::kKeystroke, blob, 800, t0_, "s1"});
  EXPECT_TRUE(st.complete);
}

TEST_F(RegistryTest, SubmissionErrors) {
  const std::string blob = store_.StoreBlob(ToBytes("x"));
  EXPECT_EQ(CodeOf([&] { store_.SubmitEnrollmentSample("nobody", {Modality::kVoice, blob, 12, t0_, "s1"}); }),
            ErrorCode::kUnknownIdentity);
  const auto id = store_.RegisterLearner("v").id;
  EXPECT_EQ(CodeOf([&] { store_.SubmitEnrollmentSample(id, {Modality::kVoice, blob, 0, t0_, "s1"}); }),
            ErrorCode::kMalformedSample);
  EXPECT_EQ(CodeOf([&] { store_.SubmitEnrollmentSample(id, {Modality::kVoice, std::string(64, 'a'), 12, t0_, "s1"}); }),
            ErrorCode::kMalformedSample);
}

TEST_F(RegistryTest, FinalizeIsWriteOnce) {
  const auto id = store_.RegisterLearner("v").id;
  EXPECT_EQ(CodeOf([&] { store_.FinalizeEnrollment(id, Modality::kVoice, VoiceTrainer()); }),
            ErrorCode::kIncompleteEnrollment);
  for (int i = 0; i < 15; ++i) store_.SubmitEnrollmentSample(id, Voice("s" + std::to_string(i / 5), 10, t0_ + days(3 * (i / 5))));
  const auto templates = store_.FinalizeEnrollment(id, Modality::kVoice, VoiceTrainer());
  EXPECT_EQ(templates.size(), 15u);
  EXPECT_TRUE(store_.IsEnrolled(id, Modality::kVoice));
  EXPECT_EQ(CodeOf([&] { store_.FinalizeEnrollment(id, Modality::kVoice, VoiceTrainer()); }),
            ErrorCode::kAlreadyEnrolled);
  const auto fetched = store_.FetchTemplates(id, Modality::kVoice);
  ASSERT_EQ(fetched.size(), 15u);
  EXPECT_EQ(Json(fetched.front()), Json(templates.front()));
  EXPECT_EQ(fetched.front().identity, id);
}

TEST_F(RegistryTest, BodyMustMatchModality) {
  const auto id = store_.RegisterLearner("v").id;
  for (int i = 0; i < 15; ++i) store_.SubmitEnrollmentSample(id, Voice("s" + std::to_string(i / 5), 10, t0_));
  EXPECT_EQ(CodeOf([&] { store_.FinalizeEnrollment(id, Modality::kVoice, KeystrokeTrainer()); }),
            ErrorCode::kMalformedSample);
  EXPECT_FALSE(store_.IsEnrolled(id, Modality::kVoice));
}

TEST_F(RegistryTest, FetchTemplates) {
  const auto id = store_.RegisterLearner("v").id;
  EXPECT_TRUE(store_.FetchTemplates(id, Modality::kFace).empty());
  EXPECT_EQ(CodeOf([&] { store_.FetchTemplates("ghost", Modality::kFace); }), ErrorCode::kUnknownIdentity);
}

TEST_F(RegistryTest, StateSurvivesReopening) {
  const auto id = store_.RegisterLearner("v").id;
  for (int i = 0; i < 15; ++i) store_.SubmitEnrollmentSample(id, Voice("s" + std::to_string(i / 5), 10, t0_));
  store_.FinalizeEnrollment(id, Modality::kVoice, VoiceTrainer());
  Registry reopened(dir_.path());
  EXPECT_EQ(reopened.FetchTemplates(id, Modality::kVoice).size(), 15u);
  EXPECT_EQ(reopened.GetEnrollmentStatus(id, Modality::kVoice).samples, 15u);
}

TEST_F(RegistryTest, AuditAppendAndReadBack) {
  AuditEvent e{AuditKind::kVerify, "id1", Instrument::kKD, Json{{"accepted", true}}, t0_};
  store_.RecordAuditEvent(e);
  EXPECT_EQ(store_.ReadAuditLog().back(), e);
  for (int i = 0; i < 1000; ++i) {
    store_.RecordAuditEvent({AuditKind::kPadCheck, "id" + std::to_string(i % 7), Instrument::kFRA, Json{{"i", i}}, t0_});
  }
  const auto log = store_.ReadAuditLog();
  ASSERT_EQ(log.size(), 1001u);
  std::map<std::string, Timestamp> last;
  for (std::size_t i = 1; i < log.size(); ++i) {
    EXPECT_EQ(log[i].outcome_summary.at("i"), static_cast<int>(i - 1));
    auto it = last.find(log[i].identity);
    if (it != last.end()) {
      EXPECT_GT(log[i].at, it->second);
    }
    last[log[i].identity] = log[i].at;
  }
}

TEST_F(RegistryTest, AuditRoundTripIsIdentity) {
  synth::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    AuditEvent e{static_cast<AuditKind>(rng.UniformInt(0, 3)), "learner-" + std::to_string(rng.UniformInt(0, 99)),
                 static_cast<Instrument>(rng.UniformInt(0, 4)),
                 Json{{"score", rng.Normal()}, {"flags", {rng.UniformInt(0, 5), "x"}}},
                 t0_ + microseconds(static_cast<long long>(rng.Next() % 1000000000000ULL))};
    EXPECT_EQ(ParseAuditEvent(SerializeAuditEvent(e)), e);
  }
}

TEST_F(RegistryTest, CorruptLogLineIsReported) {
  store_.RecordAuditEvent({AuditKind::kEnroll, "a", Instrument::kVR, Json::object(), t0_});
  {
    std::ofstream out(dir_ / "audit.jsonl", std::ios::app);
    out << "{not json\n";
  }
  try {
    store_.ReadAuditLog();
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruptLog);
    EXPECT_NE(e.detail().find("line 2"), std::string::npos) << e.detail();
  }
}

TEST(EnrollmentPolicy, Defaults) {
  const auto p = DefaultPolicies();
  EXPECT_EQ(p.at(Modality::kVoice).min_samples, 15u);
  EXPECT_EQ(p.at(Modality::kVoice).min_sessions, 3u);
  EXPECT_EQ(p.at(Modality::kVoice).min_payload, 10.0);
  EXPECT_EQ(p.at(Modality::kFace).min_payload, 5.0);
  EXPECT_EQ(p.at(Modality::kKeystroke).min_payload, 750.0);
  EnrollmentPolicy bad{Modality::kFace, 0, 1, 1};
  EXPECT_THROW(bad.Validate(), Error);
}

}  // namespace
}  // namespace trustauth::registry
