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

#ifndef TRUSTAUTH_GMM_HPP_
#define TRUSTAUTH_GMM_HPP_

// Diagonal-covariance Gaussian mixtures trained by EM, shared by the UBM of
// the speaker verifier and the one-class model of the voice PAD instrument.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trustauth/audio.hpp"
#include "trustauth/types.hpp"

namespace trustauth::gmm {

class DiagGmm {
 public:
  DiagGmm() = default;
  // Validates: weights on the simplex (1e-12), positive variances, finite means.
  DiagGmm(Eigen::VectorXd weights, Eigen::MatrixXd means, Eigen::MatrixXd variances,
          std::string frontend_digest = {});

  int num_components() const { return static_cast<int>(weights_.size()); }
  int dim() const { return static_cast<int>(means_.cols()); }
  const Eigen::VectorXd &weights() const { return weights_; }
  const Eigen::MatrixXd &means() const { return means_; }
  const Eigen::MatrixXd &variances() const { return variances_; }
  const std::string &frontend_digest() const { return frontend_digest_; }

  // log(w_k) + log N(x | mu_k, diag(var_k)) for every k.
  Eigen::VectorXd ComponentLogLikelihoods(const Eigen::Ref<const Eigen::VectorXd> &x) const;
  double LogLikelihood(const Eigen::Ref<const Eigen::VectorXd> &x) const;
  // Responsibilities; sums to one.
  Eigen::VectorXd Posteriors(const Eigen::Ref<const Eigen::VectorXd> &x) const;

  double TotalLogLikelihood(const Eigen::MatrixXd &frames) const;
  double AverageLogLikelihood(const Eigen::MatrixXd &frames) const;

  // SHA-256 of the JSON form.
  std::string Digest() const;

 private:
  Eigen::VectorXd weights_;
  Eigen::MatrixXd means_;
  Eigen::MatrixXd variances_;
  Eigen::MatrixXd inv_variances_;
  Eigen::VectorXd log_consts_;  // log w_k - 0.5 * sum_d log(2 pi var_kd)
  std::string frontend_digest_;
};

void to_json(Json &j, const DiagGmm &g);
void from_json(const Json &j, DiagGmm &g);

double LogSumExp(const Eigen::Ref<const Eigen::VectorXd> &v);

struct EmOptions {
  int num_components = 32;
  int iterations = 20;
  std::uint64_t seed = 1;
  int kmeans_iterations = 5;
  // Variance floor as a fraction of the global per-dimension variance.
  double var_floor_ratio = 1e-3;
};

struct EmResult {
  DiagGmm gmm;
  // Total data log-likelihood before each EM update plus the final model's,
  // so iterations + 1 entries.
  std::vector<double> log_likelihood;
};

// Seeded k-means++ initialisation followed by EM. Requires at least
// 10 * num_components frames (TooFewFrames). A component whose weight drops
// below 1e-8 raises DegenerateComponent.
EmResult TrainDiagGmm(const Eigen::MatrixXd &frames, const EmOptions &options);

Eigen::MatrixXd StackFrames(std::span<const audio::MfccMatrix> utterances);

DiagGmm TrainUbm(std::span<const audio::MfccMatrix> utterances, int num_components, int iterations,
                 std::uint64_t seed);

}  // namespace trustauth::gmm

#endif  // TRUSTAUTH_GMM_HPP_
