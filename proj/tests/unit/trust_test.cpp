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

#include <cmath>

#include <gtest/gtest.h>

#include "trustauth/error.hpp"
#include "trustauth/synth.hpp"
#include "trustauth/trust.hpp"

namespace trustauth::trust {
namespace {

InstrumentResult Verification(Instrument inst, double score, std::string ref, std::vector<double> items = {}) {
  VerificationOutcome o;
  o.instrument = inst;
  o.score = score;
  o.item_scores = std::move(items);
  o.accepted = true;
  return InstrumentResult{inst, o, std::move(ref), Timestamp{}};
}

InstrumentResult Pad(Instrument inst, bool attack, std::string ref) {
  PadOutcome o;
  o.instrument = inst;
  o.decision = attack ? PadDecision::kAttack : PadDecision::kBonaFide;
  o.score = attack ? -1.0 : 1.0;
  return InstrumentResult{inst, o, std::move(ref), Timestamp{}};
}

TEST(Gate, AttackDropsOnlyThePairedResultOnTheSameSample) {
  const std::vector<InstrumentResult> rs{
      Verification(Instrument::kFR, 0.9, "a", {0.8}), Verification(Instrument::kFR, 0.9, "b", {0.8}),
      Verification(Instrument::kVR, 0.7, "a"), Pad(Instrument::kFRA, true, "a"),
      Verification(Instrument::kKD, 0.5, "a")};
  const GateResult g = GateByPad(rs);
  ASSERT_EQ(g.kept.size(), 3u);
  EXPECT_EQ(g.kept[0].sample_ref, "b");
  EXPECT_EQ(g.kept[1].instrument, Instrument::kVR);
  EXPECT_EQ(g.kept[2].instrument, Instrument::kKD);
  ASSERT_EQ(g.pad_flags.size(), 1u);
  EXPECT_EQ(g.pad_flags[0].dropped, std::vector<Instrument>{Instrument::kFR});
}

TEST(Gate, BonaFidePadKeepsEverything) {
  const std::vector<InstrumentResult> rs{Verification(Instrument::kVR, 0.7, "a"), Pad(Instrument::kVRA, false, "a")};
  const GateResult g = GateByPad(rs);
  EXPECT_EQ(g.kept.size(), 1u);
  EXPECT_TRUE(g.pad_flags.empty());
}

TEST(Calibration, PerInstrumentMaps) {
  VerificationOutcome o;
  o.instrument = Instrument::kVR;
  o.score = 0.6;
  EXPECT_DOUBLE_EQ(CalibratedScore(o), 0.8);
  o.instrument = Instrument::kFR;
  o.item_scores = {0.0, 0.4};
  EXPECT_DOUBLE_EQ(CalibratedScore(o), 0.6);
  o.instrument = Instrument::kKD;
  o.score = 1.0;
  EXPECT_DOUBLE_EQ(CalibratedScore(o), std::exp(-1.0));
  o.score = 0.0;
  EXPECT_DOUBLE_EQ(CalibratedScore(o), 1.0);
}

TEST(Fuse, WeightedMean) {
  FusionConfig cfg;
  cfg.weights = {{Instrument::kFR, 0.5}, {Instrument::kVR, 0.5}};
  const std::vector<InstrumentResult> rs{Verification(Instrument::kVR, 0.6, "v"),
                                         Verification(Instrument::kFR, 0.2, "f", {0.2})};
  const FusionResult f = Fuse(rs, cfg);
  EXPECT_NEAR(f.fused_score, 0.7, 1e-12);
  EXPECT_EQ(f.decision, TrustDecision::kTrusted);
  EXPECT_EQ(f.instruments, 2);
}

TEST(Fuse, SingleInstrumentIsRenormalised) {
  FusionConfig cfg;
  cfg.weights = {{Instrument::kFR, 0.25}, {Instrument::kVR, 0.75}};
  const std::vector<InstrumentResult> rs{Verification(Instrument::kFR, 0.0, "f", {0.2})};
  EXPECT_NEAR(Fuse(rs, cfg).fused_score, 0.6, 1e-12);
}

TEST(Fuse, ResultsOfOneInstrumentAreAveraged) {
  const std::vector<InstrumentResult> rs{Verification(Instrument::kVR, 1.0, "a"), Verification(Instrument::kVR, 0.0, "b")};
  EXPECT_NEAR(Fuse(rs, FusionConfig::Uniform()).fused_score, 0.75, 1e-12);
}

TEST(Fuse, NothingLeftIsInconclusive) {
  const FusionResult f = Fuse(std::vector<InstrumentResult>{}, FusionConfig::Uniform());
  EXPECT_EQ(f.decision, TrustDecision::kInconclusive);
  FusionConfig cfg = FusionConfig::Uniform();
  cfg.min_instruments = 2;
  const std::vector<InstrumentResult> one{Verification(Instrument::kVR, 1.0, "a")};
  EXPECT_EQ(Fuse(one, cfg).decision, TrustDecision::kInconclusive);
}

TEST(FusionConfigCheck, RejectsBadWeights) {
  FusionConfig cfg = FusionConfig::Uniform();
  cfg.weights[Instrument::kVR] = -1;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = FusionConfig::Uniform();
  cfg.weights[Instrument::kFRA] = 1;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = FusionConfig{};
  EXPECT_THROW(cfg.Validate(), Error);
}

std::vector<InstrumentResult> RandomResults(synth::Rng &rng) {
  std::vector<InstrumentResult> rs;
  const int n = static_cast<int>(rng.UniformInt(0, 6));
  for (int i = 0; i < n; ++i) {
    const std::string ref = "s" + std::to_string(rng.UniformInt(0, 3));
    switch (rng.UniformInt(0, 4)) {
      case 0: rs.push_back(Verification(Instrument::kVR, rng.Uniform(-1, 1), ref)); break;
      case 1: rs.push_back(Verification(Instrument::kFR, 0, ref, {rng.Uniform(-1, 1), rng.Uniform(-1, 1)})); break;
      case 2: rs.push_back(Verification(Instrument::kKD, rng.Uniform(0, 4), ref)); break;
      case 3: rs.push_back(Pad(Instrument::kFRA, rng.Uniform() < 0.3, ref)); break;
      default: rs.push_back(Pad(Instrument::kVRA, rng.Uniform() < 0.3, ref)); break;
    }
  }
  return rs;
}

TEST(TrustProperties, AnyPadAttackMeansUntrusted) {
  synth::Rng rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto rs = RandomResults(rng);
    const TrustReport r = BuildTrustReport("id", "act", rs, FusionConfig::Uniform());
    bool attack = false;
    for (const auto &x : rs) {
      if (x.kind() == ResultKind::kPad) attack = attack || std::get<PadOutcome>(x.outcome).decision == PadDecision::kAttack;
    }
    EXPECT_EQ(!r.pad_flags.empty(), attack);
    if (attack) {
      EXPECT_EQ(r.decision, TrustDecision::kUntrusted);
    }
    EXPECT_GE(r.fused_score, 0.0);
    EXPECT_LE(r.fused_score, 1.0);
  }
}

TEST(TrustProperties, RaisingAScoreNeverLowersTheDecision) {
  synth::Rng rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    auto rs = RandomResults(rng);
    std::vector<std::size_t> verifications;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (rs[i].kind() == ResultKind::kVerification) verifications.push_back(i);
    }
    if (verifications.empty()) continue;
    const TrustReport before = BuildTrustReport("id", "act", rs, FusionConfig::Uniform());
    auto &o = std::get<VerificationOutcome>(rs[verifications[static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(verifications.size()) - 1))]].outcome);
    const double up = rng.Uniform(0, 0.5);
    if (o.instrument == Instrument::kKD) {
      o.score = std::max(0.0, o.score - up);  // lower distance is better
    } else if (o.instrument == Instrument::kVR) {
      o.score = std::min(1.0, o.score + up);
    } else {
      for (double &s : o.item_scores) s = std::min(1.0, s + up);
    }
    const TrustReport after = BuildTrustReport("id", "act", rs, FusionConfig::Uniform());
    EXPECT_GE(after.fused_score, before.fused_score - 1e-12);
    EXPECT_GE(static_cast<int>(after.decision), static_cast<int>(before.decision));
  }
}

TEST(Report, DeterministicAndRoundTrips) {
  synth::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rs = RandomResults(rng);
    const TrustReport r = BuildTrustReport("ident", "act-1", rs, FusionConfig::Uniform());
    const std::string bytes = SerializeReport(r);
    EXPECT_EQ(bytes, SerializeReport(BuildTrustReport("ident", "act-1", rs, FusionConfig::Uniform())));
    const TrustReport back = Json::parse(bytes).get<TrustReport>();
    EXPECT_EQ(SerializeReport(back), bytes);
    EXPECT_EQ(back.decision, r.decision);
    EXPECT_EQ(back.pad_flags, r.pad_flags);
  }
}

TEST(Report, MismatchedResultKindIsRejected) {
  InstrumentResult bad = Verification(Instrument::kFRA, 0.5, "a");
  EXPECT_THROW(BuildTrustReport("id", "act", std::vector<InstrumentResult>{bad}, FusionConfig::Uniform()), Error);
}

}  // namespace
}  // namespace trustauth::trust
