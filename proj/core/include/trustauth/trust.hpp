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

#ifndef TRUSTAUTH_TRUST_HPP_
#define TRUSTAUTH_TRUST_HPP_

// Per-activity evidence: PAD gating of paired verifications, weighted-sum
// fusion of calibrated scores, and the resulting trust report.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trustauth/types.hpp"

namespace trustauth::trust {

inline constexpr int kReportSchema = 1;

enum class ResultKind { kVerification, kPad };

std::string_view ResultKindName(ResultKind k);

struct InstrumentResult {
  Instrument instrument = Instrument::kVR;
  std::variant<VerificationOutcome, PadOutcome> outcome;
  std::string sample_ref;
  Timestamp at{};

  ResultKind kind() const {
    return std::holds_alternative<PadOutcome>(outcome) ? ResultKind::kPad : ResultKind::kVerification;
  }
  // InvalidArgument when the instrument and outcome kinds disagree.
  void Validate() const;
};

void to_json(Json &j, const InstrumentResult &r);
void from_json(const Json &j, InstrumentResult &r);

struct FusionConfig {
  std::map<Instrument, double> weights;  // missing instrument = weight 0
  double trust_threshold = 0.5;
  int min_instruments = 1;  // distinct verification instruments after gating

  static FusionConfig Uniform();
  void Validate() const;
};

void to_json(Json &j, const FusionConfig &c);
void from_json(const Json &j, FusionConfig &c);

// Ordered so that a larger value is a better outcome.
enum class TrustDecision { kUntrusted = 0, kInconclusive = 1, kTrusted = 2 };

std::string_view TrustDecisionName(TrustDecision d);
TrustDecision ParseTrustDecision(std::string_view s);

struct PadFlag {
  Instrument instrument = Instrument::kFRA;  // the PAD instrument
  std::string sample_ref;
  double score = 0.0;
  // Verification instruments whose results on this sample were dropped.
  std::vector<Instrument> dropped;

  bool operator==(const PadFlag &) const = default;
};

struct GateResult {
  std::vector<InstrumentResult> kept;  // verification results only
  std::vector<PadFlag> pad_flags;
};

// Every PAD attack decision becomes a flag; a verification result is dropped
// when a paired PAD instrument (FRA for FR, VRA for VR) flagged the same
// sample_ref. KD has no PAD counterpart and is never dropped.
GateResult GateByPad(std::span<const InstrumentResult> results);

// Maps a verification outcome into [0, 1], higher meaning more genuine.
// VR: (max cosine + 1) / 2. FR: (mean per-frame best cosine + 1) / 2.
// KD: exp(-distance).
double CalibratedScore(const VerificationOutcome &outcome);

struct FusionResult {
  double fused_score = 0.0;
  TrustDecision decision = TrustDecision::kInconclusive;
  int instruments = 0;
};

// Results of one instrument are averaged, then instruments are combined with
// their weights renormalised over the instruments present.
FusionResult Fuse(std::span<const InstrumentResult> kept, const FusionConfig &cfg);

struct TrustReport {
  int schema = kReportSchema;
  std::string identity;
  std::string activity_id;
  std::vector<InstrumentResult> results;
  double fused_score = 0.0;
  std::vector<PadFlag> pad_flags;
  TrustDecision decision = TrustDecision::kInconclusive;
};

void to_json(Json &j, const TrustReport &r);
void from_json(const Json &j, TrustReport &r);

// Gate, fuse, and force untrusted whenever a PAD flag exists.
TrustReport BuildTrustReport(const std::string &identity, const std::string &activity_id,
                             std::span<const InstrumentResult> results, const FusionConfig &cfg);

// Canonical serialisation used by both the CLI and the service.
std::string SerializeReport(const TrustReport &r);

}  // namespace trustauth::trust

#endif  // TRUSTAUTH_TRUST_HPP_
