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

#ifndef TRUSTAUTH_FACE_HPP_
#define TRUSTAUTH_FACE_HPP_

// Face recognition: pluggable embeddings, enrollment from frame sequences,
// per-frame cosine verification aggregated by valid-frame fraction.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "trustauth/image.hpp"
#include "trustauth/registry.hpp"
#include "trustauth/types.hpp"

namespace trustauth::face {

using image::FrameImage;
using image::FrameSequence;

class EmbeddingExtractor {
 public:
  virtual ~EmbeddingExtractor() = default;
  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  // Deterministic; returns a unit-norm vector of size dim().
  virtual FaceEmbedding Embed(const FrameImage &img) const = 0;
};

// Stand-in for a learned network: 16x16 bilinear thumbnail, mean removed,
// unit norm (first basis vector for flat images).
class ToyExtractor final : public EmbeddingExtractor {
 public:
  static constexpr int kSide = 16;
  static constexpr const char *kId = "toy-bilinear16-v1";

  std::string id() const override { return kId; }
  int dim() const override { return kSide * kSide; }
  FaceEmbedding Embed(const FrameImage &img) const override;
};

FaceEmbedding ToyEmbed(const FrameImage &img);

struct FaceOptions {
  double min_seconds = 5.0;
  // Embed every stride-th frame; 0 selects round(fps / 2), i.e. 2 per second.
  int stride = 0;
  // Sample-level accept when at least this fraction of probe frames is valid.
  double accept_fraction = 0.5;
};

int EffectiveStride(double fps, const FaceOptions &options);

// TooFewFrames when the sequence is shorter than options.min_seconds.
std::vector<FaceEmbedding> EmbedEnrollment(const FrameSequence &seq, const EmbeddingExtractor &extractor,
                                           const FaceOptions &options = {});

// A probe frame is valid when its best cosine against the enrollment set
// exceeds the threshold; score is the valid fraction.
VerificationOutcome ScoreFace(std::span<const FaceEmbedding> enrolled, std::span<const FaceEmbedding> probe,
                              double threshold, double accept_fraction = 0.5);

registry::Registry::Trainer FaceTrainer(const registry::Registry &store, const EmbeddingExtractor &extractor,
                                        const FaceOptions &options = {});

std::vector<registry::Template> EnrollFace(registry::Registry &store, const std::string &identity,
                                           const EmbeddingExtractor &extractor, const FrameSequence &video,
                                           const std::string &session_id, Timestamp captured_at,
                                           const FaceOptions &options = {});

VerificationOutcome VerifyFace(const registry::Registry &store, const std::string &claimed,
                               const EmbeddingExtractor &extractor, std::span<const FrameImage> probe,
                               double threshold, const FaceOptions &options = {});

}  // namespace trustauth::face

#endif  // TRUSTAUTH_FACE_HPP_
