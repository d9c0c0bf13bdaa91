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

#include "trustauth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "trustauth/error.hpp"

namespace trustauth::metrics {
namespace {

void RequireScores(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty()) {
    Fail(ErrorCode::kEmptyScores, "genuine and impostor score lists must be non-empty");
  }
  for (auto list : {genuine, impostor}) {
    for (double s : list) {
      if (!std::isfinite(s)) Fail(ErrorCode::kInvalidArgument, "scores must be finite");
    }
  }
}

std::vector<double> Sorted(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Count of sorted values <= t.
double CountAtMost(const std::vector<double> &sorted, double t) {
  return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
}

std::vector<double> Candidates(std::span<const double> genuine, std::span<const double> impostor) {
  std::vector<double> all(genuine.begin(), genuine.end());
  all.insert(all.end(), impostor.begin(), impostor.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  all.insert(all.begin(), std::nextafter(all.front(), -std::numeric_limits<double>::infinity()));
  return all;
}

}  // namespace

Rates RatesAt(std::span<const double> genuine, std::span<const double> impostor, double threshold) {
  RequireScores(genuine, impostor);
  Rates r;
  for (double s : impostor) r.far += s > threshold ? 1.0 : 0.0;
  for (double s : genuine) r.frr += s <= threshold ? 1.0 : 0.0;
  r.far /= static_cast<double>(impostor.size());
  r.frr /= static_cast<double>(genuine.size());
  return r;
}

Sweep SweepThresholds(std::span<const double> genuine, std::span<const double> impostor) {
  RequireScores(genuine, impostor);
  const std::vector<double> gen = Sorted(genuine), imp = Sorted(impostor);
  const double ng = static_cast<double>(gen.size()), ni = static_cast<double>(imp.size());

  Sweep out;
  out.rates.thresholds = Candidates(genuine, impostor);
  out.det.reserve(out.rates.thresholds.size());
  double best_gap = std::numeric_limits<double>::infinity();
  for (double t : out.rates.thresholds) {
    DetPoint p{(ni - CountAtMost(imp, t)) / ni, CountAtMost(gen, t) / ng, t};
    out.det.push_back(p);
    const double gap = std::abs(p.far - p.frr);
    if (gap < best_gap) {
      best_gap = gap;
      out.rates.far = p.far;
      out.rates.frr = p.frr;
      out.rates.eer_threshold = t;
    }
  }
  out.rates.eer = 0.5 * (out.rates.far + out.rates.frr);
  return out;
}

ErrorRates ComputeAcer(const std::vector<bool> &attack_says_bona_fide,
                       const std::vector<bool> &bona_fide_says_bona_fide) {
  if (attack_says_bona_fide.empty() || bona_fide_says_bona_fide.empty()) {
    Fail(ErrorCode::kEmptyScores, "attack and bona fide decision lists must be non-empty");
  }
  ErrorRates r;
  const auto accepted_attacks = std::count(attack_says_bona_fide.begin(), attack_says_bona_fide.end(), true);
  const auto rejected_bona_fide =
      std::count(bona_fide_says_bona_fide.begin(), bona_fide_says_bona_fide.end(), false);
  r.apcer = static_cast<double>(accepted_attacks) / static_cast<double>(attack_says_bona_fide.size());
  r.bpcer = static_cast<double>(rejected_bona_fide) / static_cast<double>(bona_fide_says_bona_fide.size());
  r.acer = (r.apcer + r.bpcer) / 2.0;
  return r;
}

CalibrationTarget ParseCalibrationTarget(std::string_view s) {
  if (s == "eer") return CalibrationTarget::kEer;
  if (s == "far_at" || s == "far") return CalibrationTarget::kFarAt;
  if (s == "frr_at" || s == "frr") return CalibrationTarget::kFrrAt;
  Fail(ErrorCode::kInvalidArgument, "unknown calibration target '" + std::string(s) + "'");
}

double CalibrateThreshold(std::span<const double> genuine, std::span<const double> impostor,
                          CalibrationTarget target, double value) {
  RequireScores(genuine, impostor);
  const Sweep sweep = SweepThresholds(genuine, impostor);
  const auto &ts = sweep.rates.thresholds;
  switch (target) {
    case CalibrationTarget::kEer: {
      // Centre the threshold in the gap above the EER point; rates are
      // unchanged anywhere inside that gap.
      const auto it = std::find(ts.begin(), ts.end(), sweep.rates.eer_threshold);
      if (it + 1 == ts.end()) return *it;
      return *it + 0.5 * (*(it + 1) - *it);
    }
    case CalibrationTarget::kFarAt:
      if (!(value >= 0.0 && value <= 1.0)) Fail(ErrorCode::kUnreachableTarget, "FAR target outside [0, 1]");
      for (const auto &p : sweep.det) {
        if (p.far <= value) return p.threshold;
      }
      break;
    case CalibrationTarget::kFrrAt:
      if (!(value >= 0.0 && value <= 1.0)) Fail(ErrorCode::kUnreachableTarget, "FRR target outside [0, 1]");
      for (auto it = sweep.det.rbegin(); it != sweep.det.rend(); ++it) {
        if (it->frr <= value) return it->threshold;
      }
      break;
  }
  Fail(ErrorCode::kUnreachableTarget, "no threshold reaches the requested target");
}

Json DetToJson(std::span<const DetPoint> det) {
  Json out = Json::array();
  for (const auto &p : det) out.push_back(Json::array({p.far, p.frr, p.threshold}));
  return out;
}

std::string DetToCsv(std::span<const DetPoint> det) {
  std::ostringstream os;
  os.precision(17);
  os << "far,frr,threshold\n";
  for (const auto &p : det) os << p.far << ',' << p.frr << ',' << p.threshold << '\n';
  return os.str();
}

}  // namespace trustauth::metrics
