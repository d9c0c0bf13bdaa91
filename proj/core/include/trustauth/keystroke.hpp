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

#ifndef TRUSTAUTH_KEYSTROKE_HPP_
#define TRUSTAUTH_KEYSTROKE_HPP_

// Keystroke dynamics: dwell and press-to-press flight times, a per-key /
// per-digraph statistical model, and scaled Manhattan scoring.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trustauth/registry.hpp"
#include "trustauth/types.hpp"

namespace trustauth::keystroke {

inline constexpr double kStdFloorMs = 5.0;
// Entries seen fewer times fall back to the global statistics.
inline constexpr std::size_t kMinEntryCount = 3;
inline constexpr std::size_t kMinProbeKeystrokes = 50;

struct KeyEvent {
  std::string key;
  double down_ms = 0.0;
  double up_ms = 0.0;
};

struct KeystrokeFeatures {
  std::vector<std::pair<std::string, double>> dwell;
  // Keyed by "first|second"; may be negative only for malformed input,
  // press-to-press flights of a sorted stream are >= 0.
  std::vector<std::pair<std::string, double>> flight;

  std::size_t keystrokes() const { return dwell.size(); }
};

// Case-insensitive symbolic key names.
std::string NormalizeKey(std::string_view key);
std::string PairKey(std::string_view first, std::string_view second);

// UnsortedStream when down times decrease, NegativeDwell when up < down.
KeystrokeFeatures ExtractFeatures(std::span<const KeyEvent> stream);

// TooFewKeystrokes when the stream is shorter than policy_min.
TypingModel BuildTypingModel(std::span<const KeyEvent> stream, std::size_t policy_min);

// Mean of |x - mu| / sigma over every probe dwell and flight.
double TypingDistance(const TypingModel &model, const KeystrokeFeatures &probe);

// accept iff distance < threshold. ProbeTooShort under kMinProbeKeystrokes.
VerificationOutcome ScoreTyping(const TypingModel &model, const KeystrokeFeatures &probe, double threshold);

// {key, down_ms, up_ms} per line, as JSON lines or CSV with that header.
std::vector<KeyEvent> ParseKeyEvents(std::string_view text);
std::string FormatKeyEventsJsonl(std::span<const KeyEvent> stream);

registry::Registry::Trainer TypingTrainer(const registry::Registry &store);

std::vector<registry::Template> EnrollTyping(registry::Registry &store, const std::string &identity,
                                             std::span<const KeyEvent> stream, const std::string &session_id,
                                             Timestamp captured_at);

VerificationOutcome VerifyTyping(const registry::Registry &store, const std::string &claimed,
                                 std::span<const KeyEvent> probe, double threshold);

}  // namespace trustauth::keystroke

#endif  // TRUSTAUTH_KEYSTROKE_HPP_
