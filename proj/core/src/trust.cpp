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

#include "trustauth/trust.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "trustauth/error.hpp"

namespace trustauth::trust {
namespace {

bool IsPadInstrument(Instrument i) { return i == Instrument::kFRA || i == Instrument::kVRA; }

// The verification instrument a PAD instrument protects.
std::optional<Instrument> GuardedBy(Instrument verification) {
  switch (verification) {
    case Instrument::kFR: return Instrument::kFRA;
    case Instrument::kVR: return Instrument::kVRA;
    default: return std::nullopt;
  }
}

double Clip01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::string_view ResultKindName(ResultKind k) { return k == ResultKind::kPad ? "pad" : "verification"; }

void InstrumentResult::Validate() const {
  const bool pad = kind() == ResultKind::kPad;
  if (pad != IsPadInstrument(instrument)) {
    Fail(ErrorCode::kInvalidArgument,
         "result kind does not match instrument " + std::string(ToString(instrument)));
  }
  const Instrument inner = pad ? std::get<PadOutcome>(outcome).instrument
                               : std::get<VerificationOutcome>(outcome).instrument;
  if (inner != instrument) Fail(ErrorCode::kInvalidArgument, "outcome instrument differs from result");
}

void to_json(Json &j, const InstrumentResult &r) {
  j = Json{{"instrument", ToString(r.instrument)},
           {"kind", ResultKindName(r.kind())},
           {"sample_ref", r.sample_ref},
           {"at", FormatTimestamp(r.at)}};
  std::visit([&j](const auto &o) { j["outcome"] = o; }, r.outcome);
}

void from_json(const Json &j, InstrumentResult &r) {
  r.instrument = ParseInstrument(j.at("instrument").get<std::string>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pad") {
    r.outcome = j.at("outcome").get<PadOutcome>();
  } else if (kind == "verification") {
    r.outcome = j.at("outcome").get<VerificationOutcome>();
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown result kind '" + kind + "'");
  }
  r.sample_ref = j.at("sample_ref").get<std::string>();
  r.at = ParseTimestamp(j.at("at").get<std::string>());
  r.Validate();
}

FusionConfig FusionConfig::Uniform() {
  FusionConfig c;
  c.weights = {{Instrument::kFR, 1.0}, {Instrument::kVR, 1.0}, {Instrument::kKD, 1.0}};
  return c;
}

void FusionConfig::Validate() const {
  bool positive = false;
  for (const auto &[inst, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      Fail(ErrorCode::kConfig, "fusion weight for " + std::string(ToString(inst)) + " must be >= 0");
    }
    if (IsPadInstrument(inst) && w > 0) {
      Fail(ErrorCode::kConfig, "PAD instruments gate results and carry no fusion weight");
    }
    positive = positive || w > 0;
  }
  if (!positive) Fail(ErrorCode::kConfig, "fusion needs at least one positive weight");
  if (!(trust_threshold >= 0.0 && trust_threshold <= 1.0)) {
    Fail(ErrorCode::kConfig, "trust threshold must lie in [0, 1]");
  }
  if (min_instruments < 0) Fail(ErrorCode::kConfig, "min_instruments must be >= 0");
}

void to_json(Json &j, const FusionConfig &c) {
  Json w = Json::object();
  for (const auto &[inst, v] : c.weights) w[std::string(ToString(inst))] = v;
  j = Json{{"weights", w}, {"trust_threshold", c.trust_threshold}, {"min_instruments", c.min_instruments}};
}

void from_json(const Json &j, FusionConfig &c) {
  c = FusionConfig::Uniform();
  if (j.contains("weights")) {
    c.weights.clear();
    for (const auto &[k, v] : j.at("weights").items()) c.weights[ParseInstrument(k)] = v.get<double>();
  }
  c.trust_threshold = j.value("trust_threshold", c.trust_threshold);
  c.min_instruments = j.value("min_instruments", c.min_instruments);
  c.Validate();
}

std::string_view TrustDecisionName(TrustDecision d) {
  switch (d) {
    case TrustDecision::kTrusted: return "trusted";
    case TrustDecision::kUntrusted: return "untrusted";
    case TrustDecision::kInconclusive: return "inconclusive";
  }
  return "?";
}

TrustDecision ParseTrustDecision(std::string_view s) {
  if (s == "trusted") return TrustDecision::kTrusted;
  if (s == "untrusted") return TrustDecision::kUntrusted;
  if (s == "inconclusive") return TrustDecision::kInconclusive;
  Fail(ErrorCode::kInvalidArgument, "unknown trust decision '" + std::string(s) + "'");
}

GateResult GateByPad(std::span<const InstrumentResult> results) {
  // (pad instrument, sample_ref) pairs that were judged attacks.
  std::set<std::pair<Instrument, std::string>> attacked;
  for (const auto &r : results) {
    if (r.kind() != ResultKind::kPad) continue;
    if (std::get<PadOutcome>(r.outcome).decision == PadDecision::kAttack) {
      attacked.emplace(r.instrument, r.sample_ref);
    }
  }

  GateResult out;
  for (const auto &r : results) {
    if (r.kind() != ResultKind::kPad) continue;
    const auto &pad = std::get<PadOutcome>(r.outcome);
    if (pad.decision != PadDecision::kAttack) continue;
    out.pad_flags.push_back(PadFlag{r.instrument, r.sample_ref, pad.score, {}});
  }
  for (const auto &r : results) {
    if (r.kind() != ResultKind::kVerification) continue;
    const auto guard = GuardedBy(r.instrument);
    if (guard && attacked.contains({*guard, r.sample_ref})) {
      for (auto &flag : out.pad_flags) {
        if (flag.instrument == *guard && flag.sample_ref == r.sample_ref) flag.dropped.push_back(r.instrument);
      }
      continue;
    }
    out.kept.push_back(r);
  }
  return out;
}

double CalibratedScore(const VerificationOutcome &o) {
  switch (o.instrument) {
    case Instrument::kVR: return Clip01((o.score + 1.0) / 2.0);
    case Instrument::kFR: {
      if (o.item_scores.empty()) return Clip01(o.score);
      double sum = 0.0;
      for (double s : o.item_scores) sum += s;
      return Clip01((sum / static_cast<double>(o.item_scores.size()) + 1.0) / 2.0);
    }
    case Instrument::kKD: return Clip01(std::exp(-std::max(0.0, o.score)));
    default: Fail(ErrorCode::kInvalidArgument, "no calibration for PAD instruments");
  }
}

FusionResult Fuse(std::span<const InstrumentResult> kept, const FusionConfig &cfg) {
  std::map<Instrument, std::pair<double, int>> per_instrument;
  for (const auto &r : kept) {
    if (r.kind() != ResultKind::kVerification) continue;
    auto &[sum, count] = per_instrument[r.instrument];
    sum += CalibratedScore(std::get<VerificationOutcome>(r.outcome));
    ++count;
  }
  FusionResult out;
  out.instruments = static_cast<int>(per_instrument.size());
  double total_weight = 0.0, weighted = 0.0;
  for (const auto &[inst, acc] : per_instrument) {
    const auto it = cfg.weights.find(inst);
    const double w = it == cfg.weights.end() ? 0.0 : it->second;
    total_weight += w;
    weighted += w * acc.first / acc.second;
  }
  if (total_weight > 0) out.fused_score = Clip01(weighted / total_weight);
  if (out.instruments == 0 || out.instruments < cfg.min_instruments || total_weight <= 0) {
    out.decision = TrustDecision::kInconclusive;
  } else {
    out.decision = out.fused_score >= cfg.trust_threshold ? TrustDecision::kTrusted : TrustDecision::kUntrusted;
  }
  return out;
}

void to_json(Json &j, const TrustReport &r) {
  Json flags = Json::array();
  for (const auto &f : r.pad_flags) {
    Json dropped = Json::array();
    for (Instrument i : f.dropped) dropped.push_back(ToString(i));
    flags.push_back(Json{{"instrument", ToString(f.instrument)},
                         {"sample_ref", f.sample_ref},
                         {"score", f.score},
                         {"dropped", dropped}});
  }
  j = Json{{"schema", r.schema},
           {"identity", r.identity},
           {"activity_id", r.activity_id},
           {"results", r.results},
           {"fused_score", r.fused_score},
           {"pad_flags", flags},
           {"decision", TrustDecisionName(r.decision)}};
}

void from_json(const Json &j, TrustReport &r) {
  r.schema = j.at("schema").get<int>();
  if (r.schema != kReportSchema) Fail(ErrorCode::kInvalidArgument, "unsupported report schema");
  r.identity = j.at("identity").get<std::string>();
  r.activity_id = j.at("activity_id").get<std::string>();
  r.results = j.at("results").get<std::vector<InstrumentResult>>();
  r.fused_score = j.at("fused_score").get<double>();
  r.pad_flags.clear();
  for (const auto &f : j.at("pad_flags")) {
    PadFlag flag;
    flag.instrument = ParseInstrument(f.at("instrument").get<std::string>());
    flag.sample_ref = f.at("sample_ref").get<std::string>();
    flag.score = f.at("score").get<double>();
    for (const auto &d : f.value("dropped", Json::array())) flag.dropped.push_back(ParseInstrument(d.get<std::string>()));
    r.pad_flags.push_back(std::move(flag));
  }
  r.decision = ParseTrustDecision(j.at("decision").get<std::string>());
}

TrustReport BuildTrustReport(const std::string &identity, const std::string &activity_id,
                             std::span<const InstrumentResult> results, const FusionConfig &cfg) {
  cfg.Validate();
  for (const auto &r : results) r.Validate();
  TrustReport report;
  report.identity = identity;
  report.activity_id = activity_id;
  report.results.assign(results.begin(), results.end());
  GateResult gated = GateByPad(results);
  const FusionResult fused = Fuse(gated.kept, cfg);
  report.fused_score = fused.fused_score;
  report.pad_flags = std::move(gated.pad_flags);
  report.decision = report.pad_flags.empty() ? fused.decision : TrustDecision::kUntrusted;
  return report;
}

std::string SerializeReport(const TrustReport &r) { return Json(r).dump(2) + "\n"; }

}  // namespace trustauth::trust
