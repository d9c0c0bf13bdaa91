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

#include "trustauth/pad_face.hpp"

#include <algorithm>
#include <cmath>

#include "trustauth/error.hpp"

namespace trustauth::pad {
namespace {

constexpr double kMinStd = 1e-12;
constexpr int kMaxHalvings = 40;

Eigen::VectorXd ToVector(const IqmVector &x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), kNumIqms);
}

double Objective(const std::vector<Eigen::VectorXd> &z, const std::vector<double> &y,
                 const Eigen::VectorXd &w, double b, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    loss += std::max(0.0, 1.0 - y[i] * (w.dot(z[i]) + b));
  }
  return loss / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

}  // namespace

void LinearPadModel::Validate() const {
  if (weights.size() != kNumIqms || feature_means.size() != kNumIqms ||
      feature_stds.size() != kNumIqms) {
    Fail(ErrorCode::kDimensionMismatch, "PAD model vectors must have 18 entries");
  }
  if ((feature_stds.array() <= 0.0).any()) {
    Fail(ErrorCode::kInvalidArgument, "PAD model feature stds must be positive");
  }
  if (!weights.allFinite() || !std::isfinite(bias)) {
    Fail(ErrorCode::kInvalidArgument, "PAD model weights must be finite");
  }
}

Eigen::VectorXd LinearPadModel::Normalize(const IqmVector &x) const {
  return ((ToVector(x) - feature_means).array() / feature_stds.array()).matrix();
}

double LinearPadModel::Score(const IqmVector &x) const { return weights.dot(Normalize(x)) + bias; }

void to_json(Json &j, const LinearPadModel &m) {
  j = Json{{"type", "linear_pad"},
           {"weights", VectorToJson(m.weights)},
           {"bias", m.bias},
           {"feature_means", VectorToJson(m.feature_means)},
           {"feature_stds", VectorToJson(m.feature_stds)},
           {"reference_sigma", m.reference_sigma},
           {"seed", m.seed}};
}

void from_json(const Json &j, LinearPadModel &m) {
  m.weights = VectorFromJson(j.at("weights"));
  m.bias = j.at("bias").get<double>();
  m.feature_means = VectorFromJson(j.at("feature_means"));
  m.feature_stds = VectorFromJson(j.at("feature_stds"));
  m.reference_sigma = j.value("reference_sigma", 0.5);
  m.seed = j.value("seed", std::uint64_t{0});
  m.Validate();
}

double HingeObjective(std::span<const LabeledIqm> data, const LinearPadModel &model, double l2) {
  std::vector<Eigen::VectorXd> z;
  std::vector<double> y;
  for (const auto &d : data) {
    z.push_back(model.Normalize(d.features));
    y.push_back(d.bona_fide ? 1.0 : -1.0);
  }
  return Objective(z, y, model.weights, model.bias, l2);
}

PadTrainResult TrainPadClassifier(std::span<const LabeledIqm> data, const PadTrainOptions &options) {
  const auto positives = std::count_if(data.begin(), data.end(), [](const auto &d) { return d.bona_fide; });
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(data.size())) {
    Fail(ErrorCode::kSingleClassData, "PAD training needs both bona fide and attack examples");
  }
  if (options.epochs < 0 || !(options.learning_rate > 0) || options.l2 < 0) {
    Fail(ErrorCode::kInvalidArgument, "invalid PAD training options");
  }
  const double n = static_cast<double>(data.size());

  LinearPadModel model;
  model.seed = options.seed;
  model.reference_sigma = options.reference_sigma;
  model.feature_means = Eigen::VectorXd::Zero(kNumIqms);
  for (const auto &d : data) model.feature_means += ToVector(d.features);
  model.feature_means /= n;
  model.feature_stds = Eigen::VectorXd::Zero(kNumIqms);
  for (const auto &d : data) {
    model.feature_stds += (ToVector(d.features) - model.feature_means).array().square().matrix();
  }
  model.feature_stds = (model.feature_stds / n).cwiseSqrt();
  for (Eigen::Index k = 0; k < kNumIqms; ++k) {
    if (!(model.feature_stds(k) > kMinStd)) model.feature_stds(k) = 1.0;
  }

  std::vector<Eigen::VectorXd> z;
  std::vector<double> y;
  z.reserve(data.size());
  y.reserve(data.size());
  for (const auto &d : data) {
    z.push_back(model.Normalize(d.features));
    y.push_back(d.bona_fide ? 1.0 : -1.0);
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(kNumIqms);
  double b = 0.0;
  double loss = Objective(z, y, w, b, options.l2);
  PadTrainResult result;
  result.loss.push_back(loss);
  double step = options.learning_rate;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    Eigen::VectorXd gw = options.l2 * w;
    double gb = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (y[i] * (w.dot(z[i]) + b) < 1.0) {
        gw -= y[i] * z[i] / n;
        gb -= y[i] / n;
      }
    }
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      const Eigen::VectorXd w_next = w - step * gw;
      const double b_next = b - step * gb;
      const double next = Objective(z, y, w_next, b_next, options.l2);
      if (next < loss) {
        w = w_next;
        b = b_next;
        loss = next;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    result.loss.push_back(loss);
    if (!moved) break;
  }
  model.weights = w;
  model.bias = b;
  result.model = std::move(model);
  return result;
}

double Median(std::vector<double> values) {
  if (values.empty()) Fail(ErrorCode::kEmptyInput, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

PadOutcome AggregateFrameScores(std::span<const double> scores, Aggregation aggregation) {
  if (scores.empty()) Fail(ErrorCode::kEmptyInput, "no frames to classify");
  PadOutcome out;
  out.instrument = Instrument::kFRA;
  if (aggregation == Aggregation::kMedian) {
    out.score = Median({scores.begin(), scores.end()});
  } else {
    double sum = 0.0;
    for (double s : scores) sum += s;
    out.score = sum / static_cast<double>(scores.size());
  }
  out.decision = out.score > 0 ? PadDecision::kBonaFide : PadDecision::kAttack;
  return out;
}

PadOutcome ClassifyFacePad(const LinearPadModel &model, std::span<const image::FrameImage> frames,
                           Aggregation aggregation) {
  if (frames.empty()) Fail(ErrorCode::kEmptyInput, "no frames to classify");
  model.Validate();
  std::vector<double> scores;
  scores.reserve(frames.size());
  for (const auto &f : frames) scores.push_back(model.Score(FrameIqms(f, model.reference_sigma)));
  return AggregateFrameScores(scores, aggregation);
}

}  // namespace trustauth::pad
