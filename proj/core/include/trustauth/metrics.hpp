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

#ifndef TRUSTAUTH_METRICS_HPP_
#define TRUSTAUTH_METRICS_HPP_

// Error rates for verification (FAR/FRR/EER) and PAD (APCER/BPCER/ACER).
// Scores are "higher = more genuine"; a score is accepted when it is
// strictly greater than the threshold.

#include <span>
#include <string>
#include <vector>

#include "trustauth/types.hpp"

namespace trustauth::metrics {

struct DetPoint {
  double far = 0.0;
  double frr = 0.0;
  double threshold = 0.0;
};

struct ErrorRates {
  double far = 0.0;  // at the EER threshold
  double frr = 0.0;
  double eer = 0.0;
  double eer_threshold = 0.0;
  double apcer = 0.0;
  double bpcer = 0.0;
  double acer = 0.0;
  std::vector<double> thresholds;  // ascending
};

struct Sweep {
  ErrorRates rates;
  std::vector<DetPoint> det;  // one per threshold, ascending threshold
};

struct Rates {
  double far = 0.0;
  double frr = 0.0;
};

// FAR(t) = #impostor > t / n_imp; FRR(t) = #genuine <= t / n_gen.
Rates RatesAt(std::span<const double> genuine, std::span<const double> impostor, double threshold);

// Thresholds: every distinct score plus one just below the minimum, so the
// sweep runs from (FAR 1, FRR 0) to (FAR 0, FRR 1). EER is taken at the
// threshold minimising |FAR - FRR| (lowest such threshold) and reported as
// the FAR/FRR midpoint there. EmptyScores when either list is empty.
Sweep SweepThresholds(std::span<const double> genuine, std::span<const double> impostor);

// attack_says_bona_fide[i]: attack i was classified bona fide.
// bona_fide_says_bona_fide[i]: bona fide i was classified bona fide.
ErrorRates ComputeAcer(const std::vector<bool> &attack_says_bona_fide,
                       const std::vector<bool> &bona_fide_says_bona_fide);

enum class CalibrationTarget { kEer, kFarAt, kFrrAt };

CalibrationTarget ParseCalibrationTarget(std::string_view s);

// kEer: the EER threshold (midpoint of the surrounding scores when the
// classes separate). kFarAt: smallest threshold with FAR <= value. kFrrAt:
// largest threshold with FRR <= value. UnreachableTarget for values outside
// [0, 1].
double CalibrateThreshold(std::span<const double> genuine, std::span<const double> impostor,
                          CalibrationTarget target, double value = 0.0);

Json DetToJson(std::span<const DetPoint> det);
std::string DetToCsv(std::span<const DetPoint> det);

}  // namespace trustauth::metrics

#endif  // TRUSTAUTH_METRICS_HPP_
