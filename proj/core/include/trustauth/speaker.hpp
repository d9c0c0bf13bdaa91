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

#ifndef TRUSTAUTH_SPEAKER_HPP_
#define TRUSTAUTH_SPEAKER_HPP_

// Voice recognition: Baum-Welch statistics against a UBM, total-variability
// training, i-vector extraction and max-cosine verification.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "trustauth/audio.hpp"
#include "trustauth/gmm.hpp"
#include "trustauth/registry.hpp"
#include "trustauth/types.hpp"

namespace trustauth::speaker {

struct BaumWelchStats {
  Eigen::VectorXd n;  // K zeroth-order occupancies
  Eigen::MatrixXd f;  // K x D first-order sums, centred on the UBM means
};

BaumWelchStats AccumulateStats(const Eigen::MatrixXd &frames, const gmm::DiagGmm &ubm);

struct TotalVariabilityModel {
  Eigen::MatrixXd t;  // (K*D) x R, component-major rows
  std::string ubm_digest;

  int rank() const { return static_cast<int>(t.cols()); }
};

void to_json(Json &j, const TotalVariabilityModel &m);
void from_json(const Json &j, TotalVariabilityModel &m);

// Seeded init: N(0,1) scaled per row by 0.1 * sqrt(UBM variance).
TotalVariabilityModel InitTvMatrix(const gmm::DiagGmm &ubm, int rank, std::uint64_t seed);

// Standard factor-analysis EM over utterance statistics. Fewer utterances
// than `rank` is allowed but appends a warning.
TotalVariabilityModel TrainTvMatrix(std::span<const BaumWelchStats> stats, const gmm::DiagGmm &ubm,
                                    int rank, int iterations, std::uint64_t seed,
                                    std::vector<std::string> *warnings = nullptr);

// Posterior mean w = (I + T' S^-1 N T)^-1 T' S^-1 F.
Eigen::VectorXd ExtractIVector(const BaumWelchStats &stats, const gmm::DiagGmm &ubm,
                               const TotalVariabilityModel &tv);

// a.b / (|a||b|), or 0 when either norm is below 1e-12.
double CosineSimilarity(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

// Front-end, UBM and T bundled with their digest chain checked.
class SpeakerModel {
 public:
  SpeakerModel(audio::FrontendConfig frontend, gmm::DiagGmm ubm, TotalVariabilityModel tv,
               double min_voiced_seconds = 2.0);

  const audio::FrontendConfig &frontend() const { return frontend_; }
  const gmm::DiagGmm &ubm() const { return ubm_; }
  const TotalVariabilityModel &tv() const { return tv_; }
  double min_voiced_seconds() const { return min_voiced_seconds_; }

  // Voiced MFCCs -> statistics -> i-vector. AudioTooShort when less than
  // min_voiced_seconds of voiced frames remain.
  IVector Extract(const audio::AudioBuffer &buf, std::string source_sample = {}) const;

 private:
  audio::FrontendConfig frontend_;
  gmm::DiagGmm ubm_;
  TotalVariabilityModel tv_;
  double min_voiced_seconds_;
};

// Max cosine over the enrolled i-vectors; accept iff score > threshold.
VerificationOutcome ScoreSpeaker(std::span<const IVector> enrolled, const IVector &probe, double threshold);

struct VoiceSample {
  std::string session_id;
  audio::AudioBuffer audio;
  Timestamp captured_at;
};

// Stores each sample, submits it against the voice policy and finalizes:
// one i-vector template per sample.
std::vector<registry::Template> EnrollSpeaker(registry::Registry &store, const std::string &identity,
                                              const SpeakerModel &model, std::span<const VoiceSample> samples);

// Template builder for Registry::FinalizeEnrollment over stored WAV blobs.
registry::Registry::Trainer SpeakerTrainer(const registry::Registry &store, const SpeakerModel &model);

VerificationOutcome VerifySpeaker(const registry::Registry &store, const std::string &claimed,
                                  const SpeakerModel &model, const audio::AudioBuffer &probe,
                                  double threshold);

}  // namespace trustauth::speaker

#endif  // TRUSTAUTH_SPEAKER_HPP_
