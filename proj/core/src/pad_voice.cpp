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

#include "trustauth/pad_voice.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "trustauth/error.hpp"

namespace trustauth::pad {

void to_json(Json &j, const OccGmm &m) {
  j = Json{{"type", "occ_gmm"},
           {"gmm", m.gmm},
           {"score_threshold", m.score_threshold},
           {"frontend", m.frontend},
           {"frontend_digest", m.frontend_digest}};
}

void from_json(const Json &j, OccGmm &m) {
  m.gmm = j.at("gmm").get<gmm::DiagGmm>();
  m.score_threshold = j.at("score_threshold").get<double>();
  m.frontend = j.at("frontend").get<audio::FrontendConfig>();
  m.frontend_digest = j.at("frontend_digest").get<std::string>();
  if (!std::isfinite(m.score_threshold)) Fail(ErrorCode::kConfig, "OCC threshold is not finite");
  if (m.frontend.Digest() != m.frontend_digest) {
    Fail(ErrorCode::kDigestMismatch, "OCC front-end config does not match its digest");
  }
}

double AverageVoicedLogLikelihood(const OccGmm &model, const audio::AudioBuffer &buf) {
  const audio::MfccMatrix feats = audio::VoicedMfcc(buf, model.frontend);
  if (feats.frames.cols() != model.gmm.dim()) {
    Fail(ErrorCode::kDimensionMismatch, "feature dimension differs from the OCC model");
  }
  return model.gmm.AverageLogLikelihood(feats.frames);
}

double PercentileThreshold(std::span<const double> scores, double percentile) {
  if (scores.empty()) Fail(ErrorCode::kEmptyScores, "no scores for percentile");
  if (!(percentile >= 0.0 && percentile < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "percentile must lie in [0, 1)");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const auto m = static_cast<std::size_t>(std::floor(percentile * static_cast<double>(sorted.size())));
  const double v = sorted[std::min(m, sorted.size() - 1)];
  return v - 1e-9 * (1.0 + std::abs(v));
}

OccGmm TrainOcc(std::span<const audio::AudioBuffer> bona_fide, const audio::FrontendConfig &frontend,
                const OccOptions &options) {
  frontend.Validate();
  if (options.num_components < 1) Fail(ErrorCode::kInvalidArgument, "K must be positive");
  std::vector<audio::MfccMatrix> feats;
  feats.reserve(bona_fide.size());
  for (const auto &buf : bona_fide) feats.push_back(audio::VoicedMfcc(buf, frontend));
  const Eigen::MatrixXd pooled = gmm::StackFrames(feats);
  if (pooled.rows() < 10 * static_cast<Eigen::Index>(options.num_components)) {
    Fail(ErrorCode::kTooFewFrames, "OCC training needs at least 10 frames per component, got " +
                                       std::to_string(pooled.rows()));
  }
  gmm::EmOptions em;
  em.num_components = options.num_components;
  em.iterations = options.iterations;
  em.seed = options.seed;
  OccGmm model;
  model.frontend = frontend;
  model.frontend_digest = frontend.Digest();
  const gmm::EmResult trained = gmm::TrainDiagGmm(pooled, em);
  model.gmm = gmm::DiagGmm(trained.gmm.weights(), trained.gmm.means(), trained.gmm.variances(),
                           model.frontend_digest);
  std::vector<double> per_sample;
  per_sample.reserve(feats.size());
  for (const auto &f : feats) per_sample.push_back(model.gmm.AverageLogLikelihood(f.frames));
  model.score_threshold = PercentileThreshold(per_sample, options.percentile);
  return model;
}

void RecalibrateOcc(OccGmm &model, std::span<const audio::AudioBuffer> bona_fide, double target_bpcer) {
  std::vector<double> scores;
  scores.reserve(bona_fide.size());
  for (const auto &b : bona_fide) scores.push_back(AverageVoicedLogLikelihood(model, b));
  model.score_threshold = PercentileThreshold(scores, target_bpcer);
}

PadOutcome ScoreVoicePad(const OccGmm &model, const audio::AudioBuffer &probe,
                         const audio::FrontendConfig &frontend) {
  if (frontend.Digest() != model.frontend_digest) {
    Fail(ErrorCode::kDigestMismatch, "probe front end differs from the OCC training front end");
  }
  return ScoreVoicePad(model, probe);
}

PadOutcome ScoreVoicePad(const OccGmm &model, const audio::AudioBuffer &probe) {
  if (model.frontend.Digest() != model.frontend_digest) {
    Fail(ErrorCode::kDigestMismatch, "OCC front-end config does not match its digest");
  }
  PadOutcome out;
  out.instrument = Instrument::kVRA;
  out.score = AverageVoicedLogLikelihood(model, probe) - model.score_threshold;
  out.decision = out.score > 0 ? PadDecision::kBonaFide : PadDecision::kAttack;
  return out;
}

}  // namespace trustauth::pad
