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

#ifndef TRUSTAUTH_PAD_FACE_HPP_
#define TRUSTAUTH_PAD_FACE_HPP_

// FRA: per-frame IQM vectors scored by a linear margin classifier.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trustauth/image.hpp"
#include "trustauth/iqm.hpp"
#include "trustauth/types.hpp"

namespace trustauth::pad {

struct LinearPadModel {
  Eigen::VectorXd weights;        // kNumIqms
  double bias = 0.0;
  Eigen::VectorXd feature_means;  // kNumIqms
  Eigen::VectorXd feature_stds;   // kNumIqms, strictly positive
  double reference_sigma = 0.5;
  std::uint64_t seed = 0;

  void Validate() const;
  Eigen::VectorXd Normalize(const IqmVector &x) const;
  double Score(const IqmVector &x) const;
};

void to_json(Json &j, const LinearPadModel &m);
void from_json(const Json &j, LinearPadModel &m);

struct LabeledIqm {
  IqmVector features{};
  bool bona_fide = false;
};

struct PadTrainOptions {
  int epochs = 300;
  double learning_rate = 0.5;
  double l2 = 1e-3;
  std::uint64_t seed = 0;
  double reference_sigma = 0.5;
};

struct PadTrainResult {
  LinearPadModel model;
  // Objective before the first step and after every epoch; non-increasing.
  std::vector<double> loss;
};

// Hinge loss plus l2/2 |w|^2 on z-normalised features, minimised by
// full-batch subgradient descent. A step is taken only if it lowers the
// objective; otherwise the step size is halved and retried. Weights start
// at zero so training is fully deterministic. SingleClassData if either
// label is missing.
PadTrainResult TrainPadClassifier(std::span<const LabeledIqm> data, const PadTrainOptions &options);

double HingeObjective(std::span<const LabeledIqm> data, const LinearPadModel &model, double l2);

enum class Aggregation { kMedian, kMean };

// Median of the frame scores (mean of the middle pair for even counts).
double Median(std::vector<double> values);

// EmptyInput when there are no frames.
PadOutcome ClassifyFacePad(const LinearPadModel &model, std::span<const image::FrameImage> frames,
                           Aggregation aggregation = Aggregation::kMedian);

// Aggregation of precomputed frame scores, same rule as above.
PadOutcome AggregateFrameScores(std::span<const double> scores,
                                Aggregation aggregation = Aggregation::kMedian);

}  // namespace trustauth::pad

#endif  // TRUSTAUTH_PAD_FACE_HPP_
