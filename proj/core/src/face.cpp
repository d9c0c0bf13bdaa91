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

#include "trustauth/face.hpp"

#include <cmath>

#include "trustauth/error.hpp"
#include "trustauth/speaker.hpp"

namespace trustauth::face {

FaceEmbedding ToyEmbed(const FrameImage &img) {
  img.Validate();
  const Eigen::MatrixXd thumb = image::ResizeBilinear(img.pixels, ToyExtractor::kSide, ToyExtractor::kSide);
  Eigen::VectorXd v(ToyExtractor::kSide * ToyExtractor::kSide);
  for (int r = 0; r < ToyExtractor::kSide; ++r)
    for (int c = 0; c < ToyExtractor::kSide; ++c) v[r * ToyExtractor::kSide + c] = thumb(r, c);
  v.array() -= v.mean();
  const double norm = v.norm();
  if (norm < 1e-12) {
    v.setZero();
    v[0] = 1.0;
  } else {
    v /= norm;
  }
  return FaceEmbedding{std::move(v), ToyExtractor::kId};
}

FaceEmbedding ToyExtractor::Embed(const FrameImage &img) const { return ToyEmbed(img); }

int EffectiveStride(double fps, const FaceOptions &options) {
  if (options.stride > 0) return options.stride;
  return std::max(1, static_cast<int>(std::lround(fps / 2.0)));
}

std::vector<FaceEmbedding> EmbedEnrollment(const FrameSequence &seq, const EmbeddingExtractor &extractor,
                                           const FaceOptions &options) {
  if (!(seq.fps > 0.0)) Fail(ErrorCode::kMalformedSample, "fps must be positive");
  if (seq.duration() + 1e-9 < options.min_seconds) {
    Fail(ErrorCode::kTooFewFrames, std::to_string(seq.frames.size()) + " frames at " + std::to_string(seq.fps) +
                                       " fps is shorter than " + std::to_string(options.min_seconds) + " s");
  }
  const int stride = EffectiveStride(seq.fps, options);
  std::vector<FaceEmbedding> out;
  for (std::size_t i = 0; i < seq.frames.size(); i += static_cast<std::size_t>(stride)) {
    out.push_back(extractor.Embed(seq.frames[i]));
  }
  return out;
}

VerificationOutcome ScoreFace(std::span<const FaceEmbedding> enrolled, std::span<const FaceEmbedding> probe,
                              double threshold, double accept_fraction) {
  if (enrolled.empty()) Fail(ErrorCode::kNotEnrolled, "no enrollment face templates");
  if (probe.empty()) Fail(ErrorCode::kEmptyProbe, "probe has no frames");
  for (const auto &p : probe) {
    for (const auto &e : enrolled) {
      if (p.v.size() != e.v.size()) {
        Fail(ErrorCode::kDimensionMismatch, "probe embedding dimension " + std::to_string(p.v.size()) +
                                                " differs from enrolled " + std::to_string(e.v.size()));
      }
      if (p.extractor_id != e.extractor_id) {
        Fail(ErrorCode::kDigestMismatch, "probe extractor '" + p.extractor_id + "' differs from enrolled '" +
                                             e.extractor_id + "'");
      }
    }
  }
  VerificationOutcome out;
  out.instrument = Instrument::kFR;
  out.threshold = threshold;
  std::size_t valid = 0;
  for (const auto &p : probe) {
    double best = -1.0;
    for (const auto &e : enrolled) best = std::max(best, speaker::CosineSimilarity(p.v, e.v));
    out.item_scores.push_back(best);
    if (best > threshold) ++valid;
  }
  out.score = static_cast<double>(valid) / static_cast<double>(probe.size());
  out.accepted = out.score >= accept_fraction;
  return out;
}

registry::Registry::Trainer FaceTrainer(const registry::Registry &store, const EmbeddingExtractor &extractor,
                                        const FaceOptions &options) {
  return [&store, &extractor, options](const std::vector<registry::BiometricSample> &samples) {
    std::vector<registry::TemplateDraft> drafts;
    for (const auto &s : samples) {
      const FrameSequence seq = image::DecodeFrameSequence(store.LoadBlob(s.payload_ref));
      for (auto &e : EmbedEnrollment(seq, extractor, options)) drafts.push_back({s.session_id, std::move(e)});
    }
    return drafts;
  };
}

std::vector<registry::Template> EnrollFace(registry::Registry &store, const std::string &identity,
                                           const EmbeddingExtractor &extractor, const FrameSequence &video,
                                           const std::string &session_id, Timestamp captured_at,
                                           const FaceOptions &options) {
  if (store.IsEnrolled(identity, Modality::kFace)) {
    Fail(ErrorCode::kAlreadyEnrolled, "'" + identity + "' is already enrolled for face");
  }
  if (video.duration() + 1e-9 < options.min_seconds) {
    Fail(ErrorCode::kTooFewFrames, "enrollment video is " + std::to_string(video.duration()) + " s, need " +
                                       std::to_string(options.min_seconds) + " s");
  }
  const std::string blob = store.StoreBlob(image::EncodeFrameSequence(video));
  store.SubmitEnrollmentSample(identity,
                               registry::BiometricSample{Modality::kFace, blob, video.duration(), captured_at, session_id});
  return store.FinalizeEnrollment(identity, Modality::kFace, FaceTrainer(store, extractor, options));
}

VerificationOutcome VerifyFace(const registry::Registry &store, const std::string &claimed,
                               const EmbeddingExtractor &extractor, std::span<const FrameImage> probe,
                               double threshold, const FaceOptions &options) {
  const auto templates = store.FetchTemplates(claimed, Modality::kFace);
  if (templates.empty()) Fail(ErrorCode::kNotEnrolled, "'" + claimed + "' is not enrolled for face");
  if (probe.empty()) Fail(ErrorCode::kEmptyProbe, "probe has no frames");
  std::vector<FaceEmbedding> enrolled;
  for (const auto &t : templates) enrolled.push_back(std::get<FaceEmbedding>(t.body));
  std::vector<FaceEmbedding> probes;
  for (const auto &f : probe) probes.push_back(extractor.Embed(f));
  return ScoreFace(enrolled, probes, threshold, options.accept_fraction);
}

}  // namespace trustauth::face
