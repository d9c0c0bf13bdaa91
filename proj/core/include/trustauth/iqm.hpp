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

#ifndef TRUSTAUTH_IQM_HPP_
#define TRUSTAUTH_IQM_HPP_

// Full-reference image quality measures between a frame and its low-pass
// reference. Exact formulas and guard values are listed in docs/iqm.md.

#include <array>
#include <string_view>

#include <Eigen/Dense>

#include "trustauth/image.hpp"

namespace trustauth::pad {

inline constexpr int kNumIqms = 18;

enum class Iqm {
  kMse,
  kPsnr,
  kSnr,
  kMaxDiff,
  kAvgDiff,
  kNae,
  kRamd,
  kStructContent,
  kNxcorr,
  kLmse,
  kNormMse,
  kSsimGlobal,
  kMeanAngle,
  kMeanAngleMag,
  kTotalEdgeDiff,
  kTotalCornerDiff,
  kSpectralMagErr,
  kGradMagErr,
};

using IqmVector = std::array<double, kNumIqms>;

const std::array<std::string_view, kNumIqms> &IqmNames();

inline double Get(const IqmVector &v, Iqm m) { return v[static_cast<std::size_t>(m)]; }

// Tunables fixed by the measure definitions.
inline constexpr double kPsnrCap = 100.0;
inline constexpr int kRamdCount = 10;
inline constexpr double kEdgeThreshold = 80.0;
inline constexpr double kHarrisK = 0.04;
inline constexpr double kCornerRelThreshold = 0.01;

// Gaussian-blurred copy (reflect-101 borders, kernel truncated at 4 sigma).
image::FrameImage LowpassReference(const image::FrameImage &img, double sigma = 0.5);

// DimensionMismatch unless both frames share a shape.
IqmVector ComputeIqms(const image::FrameImage &img, const image::FrameImage &ref);

// ComputeIqms(img, LowpassReference(img, sigma)).
IqmVector FrameIqms(const image::FrameImage &img, double sigma = 0.5);

// Building blocks, exposed for tests.
Eigen::MatrixXd SobelMagnitude(const Eigen::MatrixXd &img);
int HarrisCornerCount(const Eigen::MatrixXd &img, double threshold);
double HarrisMaxResponse(const Eigen::MatrixXd &img);

}  // namespace trustauth::pad

#endif  // TRUSTAUTH_IQM_HPP_
