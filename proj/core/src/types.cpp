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

#include "trustauth/types.hpp"

#include <cctype>
#include <cstdio>
#include <ctime>

#include "trustauth/error.hpp"

namespace trustauth {

std::string_view ToString(Modality m) {
  switch (m) {
    case Modality::kVoice: return "voice";
    case Modality::kFace: return "face";
    case Modality::kKeystroke: return "keystroke";
  }
  return "?";
}

std::string_view ToString(Instrument i) {
  switch (i) {
    case Instrument::kFR: return "FR";
    case Instrument::kVR: return "VR";
    case Instrument::kKD: return "KD";
    case Instrument::kFRA: return "FRA";
    case Instrument::kVRA: return "VRA";
  }
  return "?";
}

std::string_view ToString(PadDecision d) {
  return d == PadDecision::kBonaFide ? "bona_fide" : "attack";
}

Modality ParseModality(std::string_view s) {
  if (s == "voice") return Modality::kVoice;
  if (s == "face") return Modality::kFace;
  if (s == "keystroke") return Modality::kKeystroke;
  Fail(ErrorCode::kInvalidArgument, "unknown modality '" + std::string(s) + "'");
}

Instrument ParseInstrument(std::string_view s) {
  std::string u;
  for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (u == "FR") return Instrument::kFR;
  if (u == "VR") return Instrument::kVR;
  if (u == "KD") return Instrument::kKD;
  if (u == "FRA") return Instrument::kFRA;
  if (u == "VRA") return Instrument::kVRA;
  Fail(ErrorCode::kInvalidArgument, "unknown instrument '" + std::string(s) + "'");
}

PadDecision ParsePadDecision(std::string_view s) {
  if (s == "bona_fide") return PadDecision::kBonaFide;
  if (s == "attack") return PadDecision::kAttack;
  Fail(ErrorCode::kInvalidArgument, "unknown PAD decision '" + std::string(s) + "'");
}

Instrument VerificationInstrumentFor(Modality m) {
  switch (m) {
    case Modality::kVoice: return Instrument::kVR;
    case Modality::kFace: return Instrument::kFR;
    case Modality::kKeystroke: return Instrument::kKD;
  }
  return Instrument::kVR;
}

Timestamp Now() {
  return std::chrono::time_point_cast<std::chrono::microseconds>(
      std::chrono::system_clock::now());
}

std::string FormatTimestamp(Timestamp t) {
  using namespace std::chrono;
  const auto secs = floor<seconds>(t);
  const auto micros = (t - secs).count();
  std::time_t tt = secs.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<long long>(micros));
  return buf;
}

Timestamp ParseTimestamp(std::string_view s) {
  std::tm tm{};
  int year = 0, mon = 0, day = 0, hour = 0, min = 0, sec = 0, consumed = 0;
  std::string str(s);
  if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &mon, &day,
                  &hour, &min, &sec, &consumed) != 6) {
    Fail(ErrorCode::kInvalidArgument, "bad timestamp '" + str + "'");
  }
  long long micros = 0;
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < str.size() && str[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < str.size() && std::isdigit(static_cast<unsigned char>(str[pos]))) {
      if (digits < 6) {
        micros = micros * 10 + (str[pos] - '0');
        ++digits;
      }
      ++pos;
    }
    for (; digits < 6; ++digits) micros *= 10;
  }
  if (pos >= str.size() || str[pos] != 'Z' || pos + 1 != str.size()) {
    Fail(ErrorCode::kInvalidArgument, "timestamp must be UTC with trailing Z: '" + str + "'");
  }
  tm.tm_year = year - 1900;
  tm.tm_mon = mon - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = min;
  tm.tm_sec = sec;
  const std::time_t tt = timegm(&tm);
  return Timestamp(std::chrono::seconds(tt)) + std::chrono::microseconds(micros);
}

Json VectorToJson(const Eigen::VectorXd &v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Eigen::VectorXd VectorFromJson(const Json &j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json MatrixToJson(const Eigen::MatrixXd &m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd MatrixFromJson(const Json &j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json &data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    Fail(ErrorCode::kDimensionMismatch, "matrix data length does not match rows*cols");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  return m;
}

void to_json(Json &j, const VerificationOutcome &o) {
  j = Json{{"instrument", ToString(o.instrument)},
           {"score", o.score},
           {"threshold", o.threshold},
           {"accepted", o.accepted},
           {"item_scores", o.item_scores}};
}

void from_json(const Json &j, VerificationOutcome &o) {
  o.instrument = ParseInstrument(j.at("instrument").get<std::string>());
  o.score = j.at("score").get<double>();
  o.threshold = j.at("threshold").get<double>();
  o.accepted = j.at("accepted").get<bool>();
  o.item_scores = j.value("item_scores", std::vector<double>{});
}

void to_json(Json &j, const PadOutcome &o) {
  j = Json{{"instrument", ToString(o.instrument)},
           {"decision", ToString(o.decision)},
           {"score", o.score}};
}

void from_json(const Json &j, PadOutcome &o) {
  o.instrument = ParseInstrument(j.at("instrument").get<std::string>());
  o.decision = ParsePadDecision(j.at("decision").get<std::string>());
  o.score = j.at("score").get<double>();
}

void to_json(Json &j, const IVector &v) {
  j = Json{{"type", "ivector"}, {"w", VectorToJson(v.w)}, {"source_sample", v.source_sample}};
}

void from_json(const Json &j, IVector &v) {
  v.w = VectorFromJson(j.at("w"));
  v.source_sample = j.value("source_sample", "");
}

void to_json(Json &j, const FaceEmbedding &e) {
  j = Json{{"type", "face_embedding"}, {"v", VectorToJson(e.v)}, {"extractor_id", e.extractor_id}};
}

void from_json(const Json &j, FaceEmbedding &e) {
  e.v = VectorFromJson(j.at("v"));
  e.extractor_id = j.at("extractor_id").get<std::string>();
}

void to_json(Json &j, const KeyStats &s) {
  j = Json{{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

void from_json(const Json &j, KeyStats &s) {
  s.mean = j.at("mean").get<double>();
  s.std = j.at("std").get<double>();
  s.count = j.at("count").get<std::size_t>();
}

void to_json(Json &j, const TypingModel &m) {
  j = Json{{"type", "typing_model"},
           {"per_key_dwell", m.per_key_dwell},
           {"per_pair_flight", m.per_pair_flight},
           {"global_dwell", m.global_dwell},
           {"global_flight", m.global_flight},
           {"total_keystrokes", m.total_keystrokes}};
}

void from_json(const Json &j, TypingModel &m) {
  m.per_key_dwell = j.at("per_key_dwell").get<std::map<std::string, KeyStats>>();
  m.per_pair_flight = j.at("per_pair_flight").get<std::map<std::string, KeyStats>>();
  m.global_dwell = j.at("global_dwell").get<KeyStats>();
  m.global_flight = j.at("global_flight").get<KeyStats>();
  m.total_keystrokes = j.at("total_keystrokes").get<std::size_t>();
}

}  // namespace trustauth
