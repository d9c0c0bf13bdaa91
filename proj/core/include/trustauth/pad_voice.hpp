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

#ifndef TRUSTAUTH_PAD_VOICE_HPP_
#define TRUSTAUTH_PAD_VOICE_HPP_

// VRA: one-class GMM over bona fide MFCC frames. Replayed speech falls
// below the likelihood threshold.

#include <cstdint>
#include <span>
#include <string>

#include "trustauth/audio.hpp"
#include "trustauth/gmm.hpp"
#include "trustauth/types.hpp"

namespace trustauth::pad {

inline constexpr int kDefaultOccComponents = 64;
inline constexpr double kOccPercentile = 0.05;

struct OccGmm {
  gmm::DiagGmm gmm;
  double score_threshold = 0.0;  // average per-frame log-likelihood
  audio::FrontendConfig frontend;
  std::string frontend_digest;
};

void to_json(Json &j, const OccGmm &m);
void from_json(const Json &j, OccGmm &m);

struct OccOptions {
  int num_components = kDefaultOccComponents;
  int iterations = 20;
  std::uint64_t seed = 1;
  double percentile = kOccPercentile;
};

// Average per-frame log-likelihood of the voiced frames of `buf`.
double AverageVoicedLogLikelihood(const OccGmm &model, const audio::AudioBuffer &buf);

// Threshold placed just below the order statistic at floor(p * n), so at
// least (1 - p) of the given scores are strictly above it.
double PercentileThreshold(std::span<const double> scores, double percentile);

// TooFewFrames when the pooled voiced frames number fewer than 10 * K.
OccGmm TrainOcc(std::span<const audio::AudioBuffer> bona_fide, const audio::FrontendConfig &frontend,
                const OccOptions &options);

// Moves the threshold to the given percentile of held-out bona fide scores,
// i.e. a target BPCER on that set.
void RecalibrateOcc(OccGmm &model, std::span<const audio::AudioBuffer> bona_fide, double target_bpcer);

// score = average log-likelihood - threshold. DigestMismatch when the model
// was trained with a different front end than `frontend`.
PadOutcome ScoreVoicePad(const OccGmm &model, const audio::AudioBuffer &probe,
                         const audio::FrontendConfig &frontend);
PadOutcome ScoreVoicePad(const OccGmm &model, const audio::AudioBuffer &probe);

}  // namespace trustauth::pad

#endif  // TRUSTAUTH_PAD_VOICE_HPP_
