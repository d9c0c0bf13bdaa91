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

#include "trustauth/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "trustauth/error.hpp"
#include "trustauth/keystroke.hpp"
#include "trustauth/wav.hpp"

namespace trustauth {
namespace fs = std::filesystem;

namespace {

bool IsSafeActivityId(std::string_view s) {
  return !s.empty() && s.size() <= 128 && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  }) && s != "." && s != "..";
}

std::string ReadText(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) Fail(ErrorCode::kStorage, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextAtomic(const fs::path &p, std::string_view text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kStorage, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) Fail(ErrorCode::kStorage, "short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

fs::path Resolve(const fs::path &p, const fs::path &base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

Json PolicyToJson(const registry::EnrollmentPolicy &p) {
  return Json{{"min_samples", p.min_samples}, {"min_sessions", p.min_sessions}, {"min_payload", p.min_payload}};
}

registry::EnrollmentPolicy PolicyFromJson(Modality m, const Json &j) {
  registry::EnrollmentPolicy p = registry::EnrollmentPolicy::Default(m);
  p.min_samples = j.value("min_samples", p.min_samples);
  p.min_sessions = j.value("min_sessions", p.min_sessions);
  p.min_payload = j.value("min_payload", p.min_payload);
  return p;
}

std::string_view AggregationName(pad::Aggregation a) {
  return a == pad::Aggregation::kMean ? "mean" : "median";
}

pad::Aggregation ParseAggregation(std::string_view s) {
  if (s == "median") return pad::Aggregation::kMedian;
  if (s == "mean") return pad::Aggregation::kMean;
  Fail(ErrorCode::kConfig, "unknown aggregation '" + std::string(s) + "'");
}

std::string BytesView(const Bytes &b) { return std::string(b.begin(), b.end()); }

}  // namespace

std::map<Instrument, double> ServiceConfig::DefaultThresholds() {
  return {{Instrument::kVR, 0.5}, {Instrument::kFR, 0.6}, {Instrument::kKD, 1.5}};
}

double ServiceConfig::threshold(Instrument i) const {
  const auto it = thresholds.find(i);
  if (it == thresholds.end()) Fail(ErrorCode::kConfig, "no threshold for " + std::string(ToString(i)));
  return it->second;
}

void ServiceConfig::Validate() const {
  if (listen.find(':') == std::string::npos) Fail(ErrorCode::kConfig, "listen must be host:port, got '" + listen + "'");
  if (data_dir.empty()) Fail(ErrorCode::kConfig, "data_dir must not be empty");
  try {
    frontend.Validate();
    fusion.Validate();
    for (const auto &[m, p] : policies) {
      if (p.modality != m) Fail(ErrorCode::kConfig, "policy modality mismatch for " + std::string(ToString(m)));
      p.Validate();
    }
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, e.what());
  }
  for (Instrument i : {Instrument::kVR, Instrument::kFR, Instrument::kKD}) {
    if (!std::isfinite(threshold(i))) Fail(ErrorCode::kConfig, "threshold must be finite");
  }
  for (Modality m : {Modality::kVoice, Modality::kFace, Modality::kKeystroke}) {
    if (!policies.count(m)) Fail(ErrorCode::kConfig, "missing policy for " + std::string(ToString(m)));
  }
  if (!(face.min_seconds > 0) || !(face.accept_fraction > 0 && face.accept_fraction <= 1) || face.stride < 0) {
    Fail(ErrorCode::kConfig, "invalid face options");
  }
}

void to_json(Json &j, const ServiceConfig &c) {
  Json thresholds = Json::object();
  for (const auto &[i, v] : c.thresholds) thresholds[std::string(ToString(i))] = v;
  Json policies = Json::object();
  for (const auto &[m, p] : c.policies) policies[std::string(ToString(m))] = PolicyToJson(p);
  j = Json{{"listen", c.listen},
           {"data_dir", c.data_dir.string()},
           {"frontend", c.frontend},
           {"thresholds", thresholds},
           {"fusion", c.fusion},
           {"policies", policies},
           {"face",
            {{"min_seconds", c.face.min_seconds},
             {"stride", c.face.stride},
             {"accept_fraction", c.face.accept_fraction},
             {"pad_aggregation", AggregationName(c.face_pad_aggregation)}}},
           {"models", {{"voice", c.models.voice.string()}, {"vra", c.models.vra.string()}, {"fra", c.models.fra.string()}}}};
}

ServiceConfig ConfigFromJson(const Json &j, const fs::path &base_dir) {
  ServiceConfig c;
  try {
    if (!j.is_object()) Fail(ErrorCode::kConfig, "config must be a JSON object");
    c.listen = j.value("listen", c.listen);
    c.data_dir = Resolve(j.value("data_dir", c.data_dir.string()), base_dir);
    if (j.contains("frontend")) c.frontend = j.at("frontend").get<audio::FrontendConfig>();
    if (j.contains("thresholds")) {
      for (const auto &[k, v] : j.at("thresholds").items()) c.thresholds[ParseInstrument(k)] = v.get<double>();
    }
    if (j.contains("fusion")) c.fusion = j.at("fusion").get<trust::FusionConfig>();
    if (j.contains("policies")) {
      for (const auto &[k, v] : j.at("policies").items()) {
        const Modality m = ParseModality(k);
        c.policies[m] = PolicyFromJson(m, v);
      }
    }
    if (j.contains("face")) {
      const Json &f = j.at("face");
      c.face.min_seconds = f.value("min_seconds", c.face.min_seconds);
      c.face.stride = f.value("stride", c.face.stride);
      c.face.accept_fraction = f.value("accept_fraction", c.face.accept_fraction);
      c.face_pad_aggregation = ParseAggregation(f.value("pad_aggregation", std::string("median")));
    }
    if (j.contains("models")) {
      const Json &m = j.at("models");
      c.models.voice = Resolve(m.value("voice", std::string()), base_dir);
      c.models.vra = Resolve(m.value("vra", std::string()), base_dir);
      c.models.fra = Resolve(m.value("fra", std::string()), base_dir);
    }
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, e.what());
  } catch (const Json::exception &e) {
    Fail(ErrorCode::kConfig, e.what());
  }
  return c;
}

void ApplyEnvironment(ServiceConfig &c) {
  if (const char *v = std::getenv(kListenEnv); v && *v) c.listen = v;
  if (const char *v = std::getenv(kDataDirEnv); v && *v) c.data_dir = v;
}

ServiceConfig LoadConfig(const fs::path &path) {
  Json j;
  try {
    j = Json::parse(ReadText(path));
  } catch (const Json::exception &e) {
    Fail(ErrorCode::kConfig, path.string() + ": " + e.what());
  } catch (const Error &e) {
    Fail(ErrorCode::kConfig, e.detail());
  }
  ServiceConfig c = ConfigFromJson(j, path.parent_path());
  ApplyEnvironment(c);
  c.Validate();
  return c;
}

void SaveConfig(const fs::path &path, const ServiceConfig &c) { WriteJsonFile(path, Json(c)); }

Json ReadJsonFile(const fs::path &path) {
  try {
    return Json::parse(ReadText(path));
  } catch (const Json::exception &e) {
    Fail(ErrorCode::kUnsupportedFormat, path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const fs::path &path, const Json &j) { WriteTextAtomic(path, j.dump(2) + "\n"); }

Json SpeakerModelToJson(const speaker::SpeakerModel &m) {
  return Json{{"type", "speaker_model"},
              {"frontend", m.frontend()},
              {"ubm", m.ubm()},
              {"tv", m.tv()},
              {"min_voiced_seconds", m.min_voiced_seconds()}};
}

speaker::SpeakerModel SpeakerModelFromJson(const Json &j) {
  if (j.value("type", std::string()) != "speaker_model") {
    Fail(ErrorCode::kUnsupportedFormat, "not a speaker model bundle");
  }
  return speaker::SpeakerModel(j.at("frontend").get<audio::FrontendConfig>(), j.at("ubm").get<gmm::DiagGmm>(),
                               j.at("tv").get<speaker::TotalVariabilityModel>(),
                               j.value("min_voiced_seconds", 2.0));
}

audio::AudioBuffer DecodeVoice(std::span<const std::uint8_t> bytes) { return audio::DecodeWav(bytes); }

image::FrameSequence DecodeFace(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    image::FrameImage img = image::DecodePgm(bytes);
    img.source = Sha256Hex(bytes);
    img.Validate();
    return image::FrameSequence{{std::move(img)}, 1.0};
  }
  return image::DecodeFrameSequence(bytes);
}

void to_json(Json &j, const EnrollResult &r) {
  j = Json{{"status", r.status}, {"templates", r.templates}, {"sample_ref", r.sample_ref}};
}

Engine::Engine(ServiceConfig config) : config_(std::move(config)) {
  config_.Validate();
  fs::create_directories(config_.data_dir);
  registry_ = std::make_unique<registry::Registry>(config_.data_dir, config_.policies);

  const std::string digest = config_.frontend.Digest();
  auto load = [](const fs::path &p, auto &&parse) {
    try {
      parse(ReadJsonFile(p));
    } catch (const Error &e) {
      Fail(ErrorCode::kConfig, p.string() + ": " + e.what());
    } catch (const std::exception &e) {
      Fail(ErrorCode::kConfig, p.string() + ": " + e.what());
    }
  };
  // A missing file marks the instrument unavailable; an unreadable one is a
  // startup error.
  if (!config_.models.voice.empty() && fs::exists(config_.models.voice)) {
    load(config_.models.voice, [&](const Json &j) { speaker_.emplace(SpeakerModelFromJson(j)); });
    if (speaker_->frontend().Digest() != digest) {
      Fail(ErrorCode::kDigestMismatch, "voice model was trained with a different front end");
    }
  }
  if (!config_.models.vra.empty() && fs::exists(config_.models.vra)) {
    load(config_.models.vra, [&](const Json &j) { occ_.emplace(j.get<pad::OccGmm>()); });
    if (occ_->frontend_digest != digest) {
      Fail(ErrorCode::kDigestMismatch, "VRA model was trained with a different front end");
    }
  }
  if (!config_.models.fra.empty() && fs::exists(config_.models.fra)) {
    load(config_.models.fra, [&](const Json &j) { face_pad_.emplace(j.get<pad::LinearPadModel>()); });
  }
}

Engine::~Engine() = default;

bool Engine::Available(Instrument i) const {
  switch (i) {
    case Instrument::kVR: return speaker_.has_value();
    case Instrument::kVRA: return occ_.has_value();
    case Instrument::kFRA: return face_pad_.has_value();
    case Instrument::kFR:
    case Instrument::kKD: return true;
  }
  return false;
}

std::vector<Instrument> Engine::AvailableInstruments() const {
  std::vector<Instrument> out;
  for (Instrument i : {Instrument::kFR, Instrument::kVR, Instrument::kKD, Instrument::kFRA, Instrument::kVRA}) {
    if (Available(i)) out.push_back(i);
  }
  return out;
}

registry::Identity Engine::RegisterLearner(const std::string &display_name) {
  return registry_->RegisterLearner(display_name);
}

EnrollResult Engine::Enroll(const std::string &identity, Modality m, const Submission &s) {
  registry_->GetIdentity(identity);
  if (registry_->IsEnrolled(identity, m)) {
    Fail(ErrorCode::kAlreadyEnrolled, "'" + identity + "' is already enrolled for " + std::string(ToString(m)));
  }
  const Instrument instrument = VerificationInstrumentFor(m);
  if (!Available(instrument)) {
    Fail(ErrorCode::kInstrumentUnavailable, std::string(ToString(instrument)) + " has no model loaded");
  }
  // Decode and validate before anything is stored, then keep the canonical
  // container so the blob id does not depend on how the caller encoded it.
  Bytes canonical;
  double payload = 0.0;
  registry::Registry::Trainer trainer;
  switch (m) {
    case Modality::kVoice: {
      const audio::AudioBuffer buf = DecodeVoice(s.payload);
      speaker_->Extract(buf);
      canonical = audio::EncodeWav(buf);
      payload = buf.duration();
      trainer = speaker::SpeakerTrainer(*registry_, *speaker_);
      break;
    }
    case Modality::kFace: {
      const image::FrameSequence seq = DecodeFace(s.payload);
      if (seq.duration() + 1e-9 < config_.face.min_seconds) {
        Fail(ErrorCode::kTooFewFrames, "enrollment video is " + std::to_string(seq.duration()) + " s, need " +
                                           std::to_string(config_.face.min_seconds) + " s");
      }
      canonical = image::EncodeFrameSequence(seq);
      payload = seq.duration();
      trainer = face::FaceTrainer(*registry_, extractor_, config_.face);
      break;
    }
    case Modality::kKeystroke: {
      const auto events = keystroke::ParseKeyEvents(BytesView(s.payload));
      keystroke::ExtractFeatures(events);
      const auto policy_min = static_cast<std::size_t>(registry_->policy(m).min_payload);
      if (events.size() < policy_min) {
        Fail(ErrorCode::kTooFewKeystrokes,
             std::to_string(events.size()) + " keystrokes, need " + std::to_string(policy_min));
      }
      canonical = ToBytes(keystroke::FormatKeyEventsJsonl(events));
      payload = static_cast<double>(events.size());
      trainer = keystroke::TypingTrainer(*registry_);
      break;
    }
  }

  EnrollResult out;
  out.sample_ref = registry_->StoreBlob(canonical);
  out.status = registry_->SubmitEnrollmentSample(
      identity, registry::BiometricSample{m, out.sample_ref, payload, s.captured_at.value_or(Now()), s.session_id});
  if (out.status.complete) {
    out.templates = registry_->FinalizeEnrollment(identity, m, trainer).size();
    out.status = registry_->GetEnrollmentStatus(identity, m);
  }
  registry_->RecordAuditEvent(registry::AuditEvent{registry::AuditKind::kEnroll, identity, instrument,
                                                   Json{{"sample_ref", out.sample_ref},
                                                        {"samples", out.status.samples},
                                                        {"complete", out.status.complete},
                                                        {"templates", out.templates}},
                                                   Now()});
  return out;
}

trust::InstrumentResult Engine::Verify(const std::string &identity, Modality m, const Submission &s) {
  registry_->GetIdentity(identity);
  const Instrument instrument = VerificationInstrumentFor(m);
  if (!Available(instrument)) {
    Fail(ErrorCode::kInstrumentUnavailable, std::string(ToString(instrument)) + " has no model loaded");
  }
  if (!s.activity_id.empty() && !IsSafeActivityId(s.activity_id)) {
    Fail(ErrorCode::kInvalidArgument, "invalid activity id '" + s.activity_id + "'");
  }
  const double threshold = config_.threshold(instrument);
  trust::InstrumentResult r;
  r.instrument = instrument;
  r.at = s.captured_at.value_or(Now());
  switch (m) {
    case Modality::kVoice: {
      const audio::AudioBuffer buf = DecodeVoice(s.payload);
      r.outcome = speaker::VerifySpeaker(*registry_, identity, *speaker_, buf, threshold);
      r.sample_ref = registry_->StoreBlob(audio::EncodeWav(buf));
      break;
    }
    case Modality::kFace: {
      const image::FrameSequence seq = DecodeFace(s.payload);
      r.outcome = face::VerifyFace(*registry_, identity, extractor_, seq.frames, threshold, config_.face);
      r.sample_ref = registry_->StoreBlob(image::EncodeFrameSequence(seq));
      break;
    }
    case Modality::kKeystroke: {
      const auto events = keystroke::ParseKeyEvents(BytesView(s.payload));
      r.outcome = keystroke::VerifyTyping(*registry_, identity, events, threshold);
      r.sample_ref = registry_->StoreBlob(ToBytes(keystroke::FormatKeyEventsJsonl(events)));
      break;
    }
  }
  const auto &o = std::get<VerificationOutcome>(r.outcome);
  registry_->RecordAuditEvent(registry::AuditEvent{
      registry::AuditKind::kVerify, identity, instrument,
      Json{{"sample_ref", r.sample_ref}, {"score", o.score}, {"accepted", o.accepted}, {"activity_id", s.activity_id}},
      Now()});
  if (!s.activity_id.empty()) RecordResult(s.activity_id, identity, r);
  return r;
}

trust::InstrumentResult Engine::Pad(Modality m, const Submission &s, const std::string &identity) {
  if (!identity.empty()) registry_->GetIdentity(identity);
  if (!s.activity_id.empty() && !IsSafeActivityId(s.activity_id)) {
    Fail(ErrorCode::kInvalidArgument, "invalid activity id '" + s.activity_id + "'");
  }
  trust::InstrumentResult r;
  r.at = s.captured_at.value_or(Now());
  switch (m) {
    case Modality::kVoice: {
      r.instrument = Instrument::kVRA;
      if (!occ_) Fail(ErrorCode::kInstrumentUnavailable, "VRA has no model loaded");
      const audio::AudioBuffer buf = DecodeVoice(s.payload);
      r.outcome = pad::ScoreVoicePad(*occ_, buf);
      r.sample_ref = registry_->StoreBlob(audio::EncodeWav(buf));
      break;
    }
    case Modality::kFace: {
      r.instrument = Instrument::kFRA;
      if (!face_pad_) Fail(ErrorCode::kInstrumentUnavailable, "FRA has no model loaded");
      const image::FrameSequence seq = DecodeFace(s.payload);
      r.outcome = pad::ClassifyFacePad(*face_pad_, seq.frames, config_.face_pad_aggregation);
      r.sample_ref = registry_->StoreBlob(image::EncodeFrameSequence(seq));
      break;
    }
    case Modality::kKeystroke:
      Fail(ErrorCode::kInvalidArgument, "there is no PAD instrument for keystroke");
  }
  const auto &o = std::get<PadOutcome>(r.outcome);
  registry_->RecordAuditEvent(registry::AuditEvent{registry::AuditKind::kPadCheck, identity, r.instrument,
                                                   Json{{"sample_ref", r.sample_ref},
                                                        {"score", o.score},
                                                        {"decision", ToString(o.decision)},
                                                        {"activity_id", s.activity_id}},
                                                   Now()});
  if (!s.activity_id.empty()) RecordResult(s.activity_id, identity, r);
  return r;
}

fs::path Engine::ActivityDir(const std::string &activity_id) const {
  if (!IsSafeActivityId(activity_id)) Fail(ErrorCode::kInvalidArgument, "invalid activity id '" + activity_id + "'");
  return config_.data_dir / "activities" / activity_id;
}

std::mutex &Engine::ActivityMutex(const std::string &activity_id) {
  std::lock_guard lock(activities_mutex_);
  auto &slot = activity_locks_[activity_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void Engine::RecordResult(const std::string &activity_id, const std::string &identity,
                          const trust::InstrumentResult &r) {
  const fs::path dir = ActivityDir(activity_id);
  std::lock_guard lock(ActivityMutex(activity_id));
  fs::create_directories(dir);
  const fs::path meta = dir / "activity.json";
  std::string owner;
  if (fs::exists(meta)) owner = ReadJsonFile(meta).value("identity", std::string());
  if (!identity.empty()) {
    if (!owner.empty() && owner != identity) {
      Fail(ErrorCode::kInvalidArgument, "activity '" + activity_id + "' belongs to '" + owner + "'");
    }
    if (owner.empty()) WriteJsonFile(meta, Json{{"identity", identity}});
  } else if (!fs::exists(meta)) {
    WriteJsonFile(meta, Json{{"identity", ""}});
  }
  std::ofstream out(dir / "results.jsonl", std::ios::binary | std::ios::app);
  if (!out) Fail(ErrorCode::kStorage, "cannot append to activity '" + activity_id + "'");
  out << Json(r).dump() << '\n';
  if (!out.flush()) Fail(ErrorCode::kStorage, "short write to activity '" + activity_id + "'");
}

std::vector<trust::InstrumentResult> Engine::ActivityResults(const std::string &activity_id) const {
  const fs::path dir = ActivityDir(activity_id);
  if (!fs::exists(dir / "activity.json")) Fail(ErrorCode::kUnknownActivity, "no activity '" + activity_id + "'");
  std::vector<trust::InstrumentResult> out;
  std::ifstream in(dir / "results.jsonl", std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line).get<trust::InstrumentResult>());
    } catch (const std::exception &e) {
      Fail(ErrorCode::kCorruptLog, "activity '" + activity_id + "' line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

trust::TrustReport Engine::BuildReport(const std::string &activity_id, const std::string &identity) {
  const fs::path dir = ActivityDir(activity_id);
  std::lock_guard lock(ActivityMutex(activity_id));
  if (!fs::exists(dir / "activity.json")) Fail(ErrorCode::kUnknownActivity, "no activity '" + activity_id + "'");
  std::string owner = ReadJsonFile(dir / "activity.json").value("identity", std::string());
  if (!identity.empty() && !owner.empty() && identity != owner) {
    Fail(ErrorCode::kInvalidArgument, "activity '" + activity_id + "' belongs to '" + owner + "'");
  }
  if (owner.empty()) owner = identity;
  if (owner.empty()) Fail(ErrorCode::kInvalidArgument, "activity '" + activity_id + "' has no identity");
  registry_->GetIdentity(owner);

  const auto results = ActivityResults(activity_id);
  trust::TrustReport report = trust::BuildTrustReport(owner, activity_id, results, config_.fusion);
  WriteTextAtomic(dir / "report.json", trust::SerializeReport(report));
  // A fuse event spans instruments; it is filed under the first result's.
  const Instrument filed = results.empty() ? Instrument::kVR : results.front().instrument;
  registry_->RecordAuditEvent(registry::AuditEvent{registry::AuditKind::kFuse, owner, filed,
                                                   Json{{"activity_id", activity_id},
                                                        {"fused_score", report.fused_score},
                                                        {"decision", trust::TrustDecisionName(report.decision)},
                                                        {"pad_flags", report.pad_flags.size()}},
                                                   Now()});
  return report;
}

std::string Engine::StoredReport(const std::string &activity_id) const {
  const fs::path p = ActivityDir(activity_id) / "report.json";
  if (!fs::exists(p)) Fail(ErrorCode::kUnknownActivity, "no report for activity '" + activity_id + "'");
  return ReadText(p);
}

}  // namespace trustauth
