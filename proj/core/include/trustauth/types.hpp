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

#ifndef TRUSTAUTH_TYPES_HPP_
#define TRUSTAUTH_TYPES_HPP_

// Value types shared across instruments: modalities, outcomes, and the
// template bodies persisted by the registry.

#include <chrono>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace trustauth {

using Json = nlohmann::json;

enum class Modality { kVoice, kFace, kKeystroke };
enum class Instrument { kFR, kVR, kKD, kFRA, kVRA };
enum class PadDecision { kBonaFide, kAttack };

std::string_view ToString(Modality m);
std::string_view ToString(Instrument i);
std::string_view ToString(PadDecision d);
Modality ParseModality(std::string_view s);
Instrument ParseInstrument(std::string_view s);
PadDecision ParsePadDecision(std::string_view s);

// Verification instrument serving a modality (voice -> VR, ...).
Instrument VerificationInstrumentFor(Modality m);

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

Timestamp Now();
// ISO-8601 UTC with microseconds, e.g. 2026-01-02T03:04:05.000006Z.
std::string FormatTimestamp(Timestamp t);
Timestamp ParseTimestamp(std::string_view s);

struct VerificationOutcome {
  Instrument instrument = Instrument::kVR;
  // Instrument-native score: max cosine (VR), fraction of valid frames (FR),
  // scaled distance (KD, lower is better).
  double score = 0.0;
  double threshold = 0.0;
  bool accepted = false;
  // Per enrollment template (VR) or per probe frame (FR); empty for KD.
  std::vector<double> item_scores;
};

struct PadOutcome {
  Instrument instrument = Instrument::kFRA;
  PadDecision decision = PadDecision::kAttack;
  // Higher is more bona fide; decision is bona fide iff score > 0.
  double score = 0.0;
};

struct IVector {
  Eigen::VectorXd w;
  std::string source_sample;
};

struct FaceEmbedding {
  Eigen::VectorXd v;
  std::string extractor_id;
};

struct KeyStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

struct TypingModel {
  std::map<std::string, KeyStats> per_key_dwell;
  // Keyed by "first|second".
  std::map<std::string, KeyStats> per_pair_flight;
  KeyStats global_dwell;
  KeyStats global_flight;
  std::size_t total_keystrokes = 0;
};

void to_json(Json &j, const VerificationOutcome &o);
void from_json(const Json &j, VerificationOutcome &o);
void to_json(Json &j, const PadOutcome &o);
void from_json(const Json &j, PadOutcome &o);
void to_json(Json &j, const IVector &v);
void from_json(const Json &j, IVector &v);
void to_json(Json &j, const FaceEmbedding &e);
void from_json(const Json &j, FaceEmbedding &e);
void to_json(Json &j, const KeyStats &s);
void from_json(const Json &j, KeyStats &s);
void to_json(Json &j, const TypingModel &m);
void from_json(const Json &j, TypingModel &m);

Json VectorToJson(const Eigen::VectorXd &v);
Eigen::VectorXd VectorFromJson(const Json &j);
// Row-major {rows, cols, data}.
Json MatrixToJson(const Eigen::MatrixXd &m);
Eigen::MatrixXd MatrixFromJson(const Json &j);

}  // namespace trustauth

#endif  // TRUSTAUTH_TYPES_HPP_
