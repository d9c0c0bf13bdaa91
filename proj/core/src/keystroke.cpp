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

#include "trustauth/keystroke.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "trustauth/error.hpp"

namespace trustauth::keystroke {

std::string NormalizeKey(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  for (char c : key) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string PairKey(std::string_view first, std::string_view second) {
  return std::string(first) + "|" + std::string(second);
}

KeystrokeFeatures ExtractFeatures(std::span<const KeyEvent> stream) {
  KeystrokeFeatures f;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const KeyEvent &e = stream[i];
    if (!std::isfinite(e.down_ms) || !std::isfinite(e.up_ms)) {
      Fail(ErrorCode::kMalformedSample, "non-finite timestamp at event " + std::to_string(i));
    }
    if (e.up_ms < e.down_ms) Fail(ErrorCode::kNegativeDwell, "event " + std::to_string(i) + " released before pressed");
    if (i > 0 && e.down_ms < stream[i - 1].down_ms) {
      Fail(ErrorCode::kUnsortedStream, "event " + std::to_string(i) + " pressed before event " + std::to_string(i - 1));
    }
    const std::string key = NormalizeKey(e.key);
    f.dwell.emplace_back(key, e.up_ms - e.down_ms);
    if (i > 0) f.flight.emplace_back(PairKey(NormalizeKey(stream[i - 1].key), key), e.down_ms - stream[i - 1].down_ms);
  }
  return f;
}

namespace {

struct Accumulator {
  std::vector<double> values;

  KeyStats Finish() const {
    KeyStats s;
    s.count = values.size();
    if (values.empty()) {
      s.std = kStdFloorMs;
      return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    s.std = std::max(sd, kStdFloorMs);
    return s;
  }
};

const KeyStats &Lookup(const std::map<std::string, KeyStats> &table, const std::string &key, const KeyStats &global) {
  const auto it = table.find(key);
  if (it != table.end() && it->second.count >= kMinEntryCount) return it->second;
  return global;
}

}  // namespace

TypingModel BuildTypingModel(std::span<const KeyEvent> stream, std::size_t policy_min) {
  if (stream.size() < std::max<std::size_t>(policy_min, 1)) {
    Fail(ErrorCode::kTooFewKeystrokes, std::to_string(stream.size()) + " keystrokes, need " + std::to_string(policy_min));
  }
  const KeystrokeFeatures f = ExtractFeatures(stream);
  std::map<std::string, Accumulator> dwell, flight;
  Accumulator all_dwell, all_flight;
  for (const auto &[k, v] : f.dwell) {
    dwell[k].values.push_back(v);
    all_dwell.values.push_back(v);
  }
  for (const auto &[k, v] : f.flight) {
    flight[k].values.push_back(v);
    all_flight.values.push_back(v);
  }
  TypingModel m;
  for (const auto &[k, acc] : dwell) m.per_key_dwell[k] = acc.Finish();
  for (const auto &[k, acc] : flight) m.per_pair_flight[k] = acc.Finish();
  m.global_dwell = all_dwell.Finish();
  m.global_flight = all_flight.Finish();
  if (m.global_flight.count == 0) m.global_flight = m.global_dwell;  // single-event stream
  m.total_keystrokes = stream.size();
  return m;
}

double TypingDistance(const TypingModel &model, const KeystrokeFeatures &probe) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto &[k, x] : probe.dwell) {
    const KeyStats &s = Lookup(model.per_key_dwell, k, model.global_dwell);
    total += std::abs(x - s.mean) / s.std;
    ++n;
  }
  for (const auto &[k, x] : probe.flight) {
    const KeyStats &s = Lookup(model.per_pair_flight, k, model.global_flight);
    total += std::abs(x - s.mean) / s.std;
    ++n;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

VerificationOutcome ScoreTyping(const TypingModel &model, const KeystrokeFeatures &probe, double threshold) {
  if (model.total_keystrokes == 0) Fail(ErrorCode::kNoModel, "typing model is empty");
  if (probe.keystrokes() < kMinProbeKeystrokes) {
    Fail(ErrorCode::kProbeTooShort, std::to_string(probe.keystrokes()) + " probe keystrokes, need " +
                                        std::to_string(kMinProbeKeystrokes));
  }
  VerificationOutcome out;
  out.instrument = Instrument::kKD;
  out.threshold = threshold;
  out.score = TypingDistance(model, probe);
  out.accepted = out.score < threshold;
  return out;
}

namespace {

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

std::vector<KeyEvent> ParseKeyEvents(std::string_view text) {
  std::vector<KeyEvent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool csv = false;
  std::map<std::string, std::size_t> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (!csv && out.empty() && line.front() != '{') {
        csv = true;
        const auto header = SplitCsv(line);
        for (std::size_t i = 0; i < header.size(); ++i) columns[header[i]] = i;
        if (!columns.count("key") || !columns.count("down_ms") || !columns.count("up_ms")) {
          Fail(ErrorCode::kMalformedSample, "CSV header must name key, down_ms, up_ms");
        }
        continue;
      }
      if (csv) {
        const auto cells = SplitCsv(line);
        out.push_back(KeyEvent{cells.at(columns["key"]), std::stod(cells.at(columns["down_ms"])),
                               std::stod(cells.at(columns["up_ms"]))});
      } else {
        const Json j = Json::parse(line);
        out.push_back(KeyEvent{j.at("key").get<std::string>(), j.at("down_ms").get<double>(),
                               j.at("up_ms").get<double>()});
      }
    } catch (const Error &) {
      throw;
    } catch (const std::exception &e) {
      Fail(ErrorCode::kMalformedSample, "key event line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string FormatKeyEventsJsonl(std::span<const KeyEvent> stream) {
  std::string out;
  for (const auto &e : stream) {
    out += Json{{"key", e.key}, {"down_ms", e.down_ms}, {"up_ms", e.up_ms}}.dump();
    out.push_back('\n');
  }
  return out;
}

registry::Registry::Trainer TypingTrainer(const registry::Registry &store) {
  return [&store](const std::vector<registry::BiometricSample> &samples) {
    std::vector<registry::TemplateDraft> drafts;
    const std::size_t policy_min = static_cast<std::size_t>(store.policy(Modality::kKeystroke).min_payload);
    for (const auto &s : samples) {
      const Bytes raw = store.LoadBlob(s.payload_ref);
      const auto events = ParseKeyEvents(std::string_view(reinterpret_cast<const char *>(raw.data()), raw.size()));
      drafts.push_back({s.session_id, BuildTypingModel(events, policy_min)});
    }
    return drafts;
  };
}

std::vector<registry::Template> EnrollTyping(registry::Registry &store, const std::string &identity,
                                             std::span<const KeyEvent> stream, const std::string &session_id,
                                             Timestamp captured_at) {
  if (store.IsEnrolled(identity, Modality::kKeystroke)) {
    Fail(ErrorCode::kAlreadyEnrolled, "'" + identity + "' is already enrolled for keystroke");
  }
  ExtractFeatures(stream);
  const std::size_t policy_min = static_cast<std::size_t>(store.policy(Modality::kKeystroke).min_payload);
  if (stream.size() < policy_min) {
    Fail(ErrorCode::kTooFewKeystrokes, std::to_string(stream.size()) + " keystrokes, need " + std::to_string(policy_min));
  }
  const std::string blob = store.StoreBlob(ToBytes(FormatKeyEventsJsonl(stream)));
  store.SubmitEnrollmentSample(identity, registry::BiometricSample{Modality::kKeystroke, blob,
                                                                   static_cast<double>(stream.size()), captured_at,
                                                                   session_id});
  return store.FinalizeEnrollment(identity, Modality::kKeystroke, TypingTrainer(store));
}

VerificationOutcome VerifyTyping(const registry::Registry &store, const std::string &claimed,
                                 std::span<const KeyEvent> probe, double threshold) {
  const auto templates = store.FetchTemplates(claimed, Modality::kKeystroke);
  if (templates.empty()) Fail(ErrorCode::kNoModel, "'" + claimed + "' has no typing model");
  return ScoreTyping(std::get<TypingModel>(templates.front().body), ExtractFeatures(probe), threshold);
}

}  // namespace trustauth::keystroke
