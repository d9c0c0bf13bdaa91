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

#include "trustauth/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "trustauth/crypto.hpp"
#include "trustauth/error.hpp"

namespace trustauth::gmm {

double LogSumExp(const Eigen::Ref<const Eigen::VectorXd> &v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

DiagGmm::DiagGmm(Eigen::VectorXd weights, Eigen::MatrixXd means, Eigen::MatrixXd variances,
                 std::string frontend_digest)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      variances_(std::move(variances)),
      frontend_digest_(std::move(frontend_digest)) {
  const auto k = weights_.size();
  if (k < 1 || means_.rows() != k || variances_.rows() != k || means_.cols() != variances_.cols() ||
      means_.cols() < 1) {
    Fail(ErrorCode::kDimensionMismatch, "inconsistent GMM parameter shapes");
  }
  if ((weights_.array() < 0.0).any() || std::abs(weights_.sum() - 1.0) > 1e-12) {
    Fail(ErrorCode::kInvalidArgument, "GMM weights must lie on the simplex");
  }
  if (!(variances_.array() > 0.0).all() || !variances_.allFinite() || !means_.allFinite()) {
    Fail(ErrorCode::kInvalidArgument, "GMM variances must be positive and parameters finite");
  }
  inv_variances_ = variances_.cwiseInverse();
  log_consts_.resize(k);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index c = 0; c < k; ++c) {
    log_consts_[c] = std::log(weights_[c]) -
                     0.5 * (dim() * log2pi + variances_.row(c).array().log().sum());
  }
}

Eigen::VectorXd DiagGmm::ComponentLogLikelihoods(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  if (x.size() != dim()) Fail(ErrorCode::kDimensionMismatch, "frame dimension does not match GMM");
  Eigen::VectorXd out(num_components());
  for (int c = 0; c < num_components(); ++c) {
    const auto diff = x.transpose().array() - means_.row(c).array();
    out[c] = log_consts_[c] - 0.5 * (diff.square() * inv_variances_.row(c).array()).sum();
  }
  return out;
}

double DiagGmm::LogLikelihood(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  return LogSumExp(ComponentLogLikelihoods(x));
}

Eigen::VectorXd DiagGmm::Posteriors(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  const Eigen::VectorXd ll = ComponentLogLikelihoods(x);
  const double total = LogSumExp(ll);
  return (ll.array() - total).exp();
}

double DiagGmm::TotalLogLikelihood(const Eigen::MatrixXd &frames) const {
  double total = 0.0;
  for (Eigen::Index t = 0; t < frames.rows(); ++t) total += LogLikelihood(frames.row(t).transpose());
  return total;
}

double DiagGmm::AverageLogLikelihood(const Eigen::MatrixXd &frames) const {
  if (frames.rows() == 0) Fail(ErrorCode::kTooFewFrames, "no frames to score");
  return TotalLogLikelihood(frames) / static_cast<double>(frames.rows());
}

std::string DiagGmm::Digest() const { return Sha256Hex(Json(*this).dump()); }

void to_json(Json &j, const DiagGmm &g) {
  j = Json{{"type", "diag_gmm"},
           {"weights", VectorToJson(g.weights())},
           {"means", MatrixToJson(g.means())},
           {"variances", MatrixToJson(g.variances())},
           {"frontend_digest", g.frontend_digest()}};
}

void from_json(const Json &j, DiagGmm &g) {
  g = DiagGmm(VectorFromJson(j.at("weights")), MatrixFromJson(j.at("means")),
              MatrixFromJson(j.at("variances")), j.value("frontend_digest", ""));
}

namespace {

Eigen::MatrixXd KMeansPlusPlus(const Eigen::MatrixXd &x, int k, std::mt19937_64 &rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (x.row(i) - centers.row(0)).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total <= 0.0) {
      chosen = pick(rng);
    } else {
      double target = unit(rng) * total;
      for (chosen = 0; chosen < n - 1; ++chosen) {
        target -= d2[chosen];
        if (target < 0.0) break;
      }
    }
    centers.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (x.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

std::vector<int> Assign(const Eigen::MatrixXd &x, const Eigen::MatrixXd &centers) {
  std::vector<int> label(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
    label[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return label;
}

}  // namespace

EmResult TrainDiagGmm(const Eigen::MatrixXd &frames, const EmOptions &options) {
  const int k = options.num_components;
  const Eigen::Index n = frames.rows();
  const Eigen::Index d = frames.cols();
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "num_components must be >= 1");
  if (n < 10 * static_cast<Eigen::Index>(k) || d < 1) {
    Fail(ErrorCode::kTooFewFrames, std::to_string(n) + " frames for " + std::to_string(k) +
                                       " components; need at least " + std::to_string(10 * k));
  }
  if (!frames.allFinite()) Fail(ErrorCode::kInvalidArgument, "training frames must be finite");

  const Eigen::RowVectorXd global_mean = frames.colwise().mean();
  const Eigen::RowVectorXd global_var =
      (frames.rowwise() - global_mean).array().square().colwise().mean().matrix();
  Eigen::RowVectorXd floor = options.var_floor_ratio * global_var;
  for (Eigen::Index j = 0; j < d; ++j) floor[j] = std::max(floor[j], 1e-12);

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd centers = KMeansPlusPlus(frames, k, rng);
  std::vector<int> label;
  for (int it = 0; it < std::max(1, options.kmeans_iterations); ++it) {
    label = Assign(frames, centers);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(label[static_cast<std::size_t>(i)]) += frames.row(i);
      counts[label[static_cast<std::size_t>(i)]] += 1.0;
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
  }
  label = Assign(frames, centers);

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd vars = Eigen::MatrixXd::Zero(k, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = label[static_cast<std::size_t>(i)];
    weights[c] += 1.0;
    vars.row(c) += (frames.row(i) - centers.row(c)).array().square().matrix();
  }
  for (int c = 0; c < k; ++c) {
    if (weights[c] >= 2.0) {
      vars.row(c) /= weights[c];
    } else {
      vars.row(c) = global_var;
    }
    vars.row(c) = vars.row(c).cwiseMax(floor);
    weights[c] = std::max(weights[c], 1.0);
  }
  weights /= weights.sum();

  EmResult result;
  DiagGmm model(weights, centers, vars);
  Eigen::MatrixXd post(n, k);
  for (int it = 0; it <= options.iterations; ++it) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd ll = model.ComponentLogLikelihoods(frames.row(i).transpose());
      const double lse = LogSumExp(ll);
      total += lse;
      post.row(i) = (ll.array() - lse).exp().transpose();
    }
    result.log_likelihood.push_back(total);
    if (it == options.iterations) break;

    const Eigen::VectorXd occ = post.colwise().sum().transpose();
    const Eigen::MatrixXd first = post.transpose() * frames;
    const Eigen::MatrixXd second = post.transpose() * frames.array().square().matrix();
    Eigen::VectorXd new_weights = occ / static_cast<double>(n);
    Eigen::MatrixXd new_means(k, d), new_vars(k, d);
    for (int c = 0; c < k; ++c) {
      if (new_weights[c] < 1e-8) {
        Fail(ErrorCode::kDegenerateComponent,
             "component " + std::to_string(c) + " weight fell to " + std::to_string(new_weights[c]));
      }
      new_means.row(c) = first.row(c) / occ[c];
      new_vars.row(c) = (second.row(c) / occ[c]).array() - new_means.row(c).array().square();
      new_vars.row(c) = new_vars.row(c).cwiseMax(floor);
    }
    new_weights /= new_weights.sum();
    model = DiagGmm(new_weights, new_means, new_vars);
  }
  result.gmm = std::move(model);
  return result;
}

Eigen::MatrixXd StackFrames(std::span<const audio::MfccMatrix> utterances) {
  Eigen::Index rows = 0, cols = -1;
  for (const auto &u : utterances) {
    rows += u.frames.rows();
    if (u.frames.rows() == 0) continue;
    if (cols >= 0 && u.frames.cols() != cols) Fail(ErrorCode::kDimensionMismatch, "utterance feature dims differ");
    cols = u.frames.cols();
  }
  Eigen::MatrixXd out(rows, std::max<Eigen::Index>(cols, 0));
  Eigen::Index r = 0;
  for (const auto &u : utterances) {
    if (u.frames.rows() == 0) continue;
    out.middleRows(r, u.frames.rows()) = u.frames;
    r += u.frames.rows();
  }
  return out;
}

DiagGmm TrainUbm(std::span<const audio::MfccMatrix> utterances, int num_components, int iterations,
                 std::uint64_t seed) {
  EmOptions options;
  options.num_components = num_components;
  options.iterations = iterations;
  options.seed = seed;
  const Eigen::MatrixXd frames = StackFrames(utterances);
  if (frames.rows() == 0) Fail(ErrorCode::kTooFewFrames, "no training frames");
  DiagGmm g = TrainDiagGmm(frames, options).gmm;
  const std::string digest = utterances.empty() ? std::string{} : utterances.front().config_digest;
  return DiagGmm(g.weights(), g.means(), g.variances(), digest);
}

}  // namespace trustauth::gmm
