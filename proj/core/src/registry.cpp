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

#include "trustauth/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "trustauth/error.hpp"

namespace fs = std::filesystem;

namespace trustauth::registry {
namespace {

std::string ReadFile(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) Fail(ErrorCode::kStorage, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file and renames, so readers never see a
// half-written document.
void WriteFileAtomic(const fs::path &p, std::string_view contents) {
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kStorage, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) Fail(ErrorCode::kStorage, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) Fail(ErrorCode::kStorage, "rename failed for " + p.string() + ": " + ec.message());
}

void AppendLine(const fs::path &p, std::string_view line) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::app);
  if (!out) Fail(ErrorCode::kStorage, "cannot append to " + p.string());
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.put('\n');
  out.flush();
  if (!out) Fail(ErrorCode::kStorage, "append failed for " + p.string());
}

bool IsHexId(std::string_view s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

bool IsSafeId(std::string_view s) {
  return !s.empty() && s.size() <= 128 && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

}  // namespace

bool BodyMatches(Modality m, const TemplateBody &body) {
  switch (m) {
    case Modality::kVoice: return std::holds_alternative<IVector>(body);
    case Modality::kFace: return std::holds_alternative<FaceEmbedding>(body);
    case Modality::kKeystroke: return std::holds_alternative<TypingModel>(body);
  }
  return false;
}

void EnrollmentPolicy::Validate() const {
  if (min_samples < 1 || min_sessions < 1 || !(min_payload >= 1.0)) {
    Fail(ErrorCode::kConfig, "enrollment policy minima must all be >= 1");
  }
}

EnrollmentPolicy EnrollmentPolicy::Default(Modality m) {
  switch (m) {
    case Modality::kVoice: return {Modality::kVoice, 15, 3, 10.0};
    case Modality::kFace: return {Modality::kFace, 1, 1, 5.0};
    case Modality::kKeystroke: return {Modality::kKeystroke, 1, 1, 750.0};
  }
  return {};
}

std::map<Modality, EnrollmentPolicy> DefaultPolicies() {
  return {{Modality::kVoice, EnrollmentPolicy::Default(Modality::kVoice)},
          {Modality::kFace, EnrollmentPolicy::Default(Modality::kFace)},
          {Modality::kKeystroke, EnrollmentPolicy::Default(Modality::kKeystroke)}};
}

EnrollmentStatus EvaluatePolicy(const EnrollmentPolicy &policy,
                                std::span<const BiometricSample> samples) {
  EnrollmentStatus status;
  status.modality = policy.modality;
  status.samples = samples.size();
  std::set<std::string> sessions;
  // Earliest capture per session, for the separation advisory.
  std::map<std::string, Timestamp> session_start;
  for (const auto &s : samples) {
    if (s.duration_or_count < policy.min_payload) continue;
    ++status.qualifying_samples;
    sessions.insert(s.session_id);
    auto [it, inserted] = session_start.emplace(s.session_id, s.captured_at);
    if (!inserted && s.captured_at < it->second) it->second = s.captured_at;
  }
  status.sessions = sessions.size();
  status.complete = status.qualifying_samples >= policy.min_samples &&
                    status.sessions >= policy.min_sessions;

  std::vector<std::pair<Timestamp, std::string>> starts;
  for (const auto &[name, at] : session_start) starts.emplace_back(at, name);
  std::sort(starts.begin(), starts.end());
  for (std::size_t i = 1; i < starts.size(); ++i) {
    if (starts[i].first - starts[i - 1].first < std::chrono::hours(24)) {
      status.warnings.push_back("sessions '" + starts[i - 1].second + "' and '" +
                                starts[i].second + "' are less than a day apart");
    }
  }
  if (samples.size() > status.qualifying_samples) {
    status.warnings.push_back(std::to_string(samples.size() - status.qualifying_samples) +
                              " sample(s) below the per-sample payload minimum");
  }
  return status;
}

std::string_view ToString(AuditKind k) {
  switch (k) {
    case AuditKind::kEnroll: return "enroll";
    case AuditKind::kVerify: return "verify";
    case AuditKind::kPadCheck: return "pad_check";
    case AuditKind::kFuse: return "fuse";
  }
  return "?";
}

AuditKind ParseAuditKind(std::string_view s) {
  if (s == "enroll") return AuditKind::kEnroll;
  if (s == "verify") return AuditKind::kVerify;
  if (s == "pad_check") return AuditKind::kPadCheck;
  if (s == "fuse") return AuditKind::kFuse;
  Fail(ErrorCode::kInvalidArgument, "unknown audit event kind '" + std::string(s) + "'");
}

std::string SerializeAuditEvent(const AuditEvent &e) {
  Json j{{"event_kind", ToString(e.kind)},
         {"identity", e.identity},
         {"instrument", ToString(e.instrument)},
         {"outcome_summary", e.outcome_summary},
         {"at", FormatTimestamp(e.at)}};
  return j.dump();
}

AuditEvent ParseAuditEvent(std::string_view line) {
  const Json j = Json::parse(line);
  AuditEvent e;
  e.kind = ParseAuditKind(j.at("event_kind").get<std::string>());
  e.identity = j.at("identity").get<std::string>();
  e.instrument = ParseInstrument(j.at("instrument").get<std::string>());
  e.outcome_summary = j.at("outcome_summary");
  e.at = ParseTimestamp(j.at("at").get<std::string>());
  return e;
}

void to_json(Json &j, const Identity &id) {
  j = Json{{"id", id.id}, {"display_name", id.display_name}, {"created_at", FormatTimestamp(id.created_at)}};
}

void from_json(const Json &j, Identity &id) {
  id.id = j.at("id").get<std::string>();
  id.display_name = j.at("display_name").get<std::string>();
  id.created_at = ParseTimestamp(j.at("created_at").get<std::string>());
}

void to_json(Json &j, const BiometricSample &s) {
  j = Json{{"modality", ToString(s.modality)},
           {"payload_ref", s.payload_ref},
           {"duration_or_count", s.duration_or_count},
           {"captured_at", FormatTimestamp(s.captured_at)},
           {"session_id", s.session_id}};
}

void from_json(const Json &j, BiometricSample &s) {
  s.modality = ParseModality(j.at("modality").get<std::string>());
  s.payload_ref = j.at("payload_ref").get<std::string>();
  s.duration_or_count = j.at("duration_or_count").get<double>();
  s.captured_at = ParseTimestamp(j.at("captured_at").get<std::string>());
  s.session_id = j.at("session_id").get<std::string>();
}

void to_json(Json &j, const Template &t) {
  Json body;
  std::visit([&body](const auto &b) { body = b; }, t.body);
  j = Json{{"identity", t.identity},
           {"modality", ToString(t.modality)},
           {"session_id", t.session_id},
           {"body", std::move(body)},
           {"created_at", FormatTimestamp(t.created_at)}};
}

void from_json(const Json &j, Template &t) {
  t.identity = j.at("identity").get<std::string>();
  t.modality = ParseModality(j.at("modality").get<std::string>());
  t.session_id = j.at("session_id").get<std::string>();
  t.created_at = ParseTimestamp(j.at("created_at").get<std::string>());
  const Json &body = j.at("body");
  switch (t.modality) {
    case Modality::kVoice: t.body = body.get<IVector>(); break;
    case Modality::kFace: t.body = body.get<FaceEmbedding>(); break;
    case Modality::kKeystroke: t.body = body.get<TypingModel>(); break;
  }
}

void to_json(Json &j, const EnrollmentStatus &s) {
  j = Json{{"modality", ToString(s.modality)},
           {"samples", s.samples},
           {"qualifying_samples", s.qualifying_samples},
           {"sessions", s.sessions},
           {"complete", s.complete},
           {"finalized", s.finalized},
           {"warnings", s.warnings}};
}

Registry::Registry(fs::path root, std::map<Modality, EnrollmentPolicy> policies, Clock clock)
    : root_(std::move(root)), policies_(std::move(policies)), clock_(std::move(clock)) {
  for (Modality m : {Modality::kVoice, Modality::kFace, Modality::kKeystroke}) {
    if (!policies_.count(m)) policies_[m] = EnrollmentPolicy::Default(m);
    policies_[m].modality = m;
    policies_[m].Validate();
  }
  std::error_code ec;
  for (const char *sub : {"identities", "blobs", "samples", "templates"}) {
    fs::create_directories(root_ / sub, ec);
    if (ec) Fail(ErrorCode::kStorage, "cannot create " + (root_ / sub).string() + ": " + ec.message());
  }
}

fs::path Registry::IdentityPath(const std::string &id) const {
  return root_ / "identities" / (id + ".json");
}

fs::path Registry::SamplesPath(const std::string &id, Modality m) const {
  return root_ / "samples" / id / (std::string(ToString(m)) + ".jsonl");
}

fs::path Registry::TemplateDir(const std::string &id, Modality m) const {
  return root_ / "templates" / id / std::string(ToString(m));
}

std::mutex &Registry::IdentityMutex(const std::string &id) {
  std::lock_guard lock(locks_mutex_);
  auto &slot = identity_locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void Registry::RequireIdentity(const std::string &id) const {
  if (!HasIdentity(id)) Fail(ErrorCode::kUnknownIdentity, "no learner with id '" + id + "'");
}

Identity Registry::RegisterLearner(std::string_view display_name) {
  const bool blank = std::all_of(display_name.begin(), display_name.end(),
                                 [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  if (display_name.empty() || blank) Fail(ErrorCode::kInvalidName, "display name must not be empty");

  static thread_local std::mt19937_64 rng{std::random_device{}() ^
                                          static_cast<std::uint64_t>(Now().time_since_epoch().count())};
  std::unique_lock lock(store_mutex_);
  Identity identity;
  do {
    std::ostringstream id;
    id << "L" << std::hex << std::setw(16) << std::setfill('0') << rng();
    identity.id = id.str();
  } while (fs::exists(IdentityPath(identity.id)));
  identity.display_name = std::string(display_name);
  identity.created_at = clock_();
  WriteFileAtomic(IdentityPath(identity.id), Json(identity).dump(2));
  return identity;
}

Identity Registry::GetIdentity(const std::string &id) const {
  RequireIdentity(id);
  std::shared_lock lock(store_mutex_);
  return Json::parse(ReadFile(IdentityPath(id))).get<Identity>();
}

bool Registry::HasIdentity(const std::string &id) const {
  if (!IsSafeId(id)) return false;
  std::shared_lock lock(store_mutex_);
  return fs::exists(IdentityPath(id));
}

std::string Registry::StoreBlob(std::span<const std::uint8_t> payload) {
  const std::string id = Sha256Hex(payload);
  const fs::path p = root_ / "blobs" / id;
  std::unique_lock lock(store_mutex_);
  if (!fs::exists(p)) {
    WriteFileAtomic(p, std::string_view(reinterpret_cast<const char *>(payload.data()), payload.size()));
  }
  return id;
}

Bytes Registry::LoadBlob(const std::string &blob_id) const {
  if (!IsHexId(blob_id)) Fail(ErrorCode::kMalformedSample, "bad blob id '" + blob_id + "'");
  std::shared_lock lock(store_mutex_);
  const std::string s = ReadFile(root_ / "blobs" / blob_id);
  return Bytes(s.begin(), s.end());
}

bool Registry::HasBlob(const std::string &blob_id) const {
  if (!IsHexId(blob_id)) return false;
  std::shared_lock lock(store_mutex_);
  return fs::exists(root_ / "blobs" / blob_id);
}

EnrollmentStatus Registry::SubmitEnrollmentSample(const std::string &identity,
                                                  const BiometricSample &sample) {
  RequireIdentity(identity);
  if (!(sample.duration_or_count > 0.0) || !std::isfinite(sample.duration_or_count)) {
    Fail(ErrorCode::kMalformedSample, "duration_or_count must be positive");
  }
  if (sample.session_id.empty()) Fail(ErrorCode::kMalformedSample, "session_id must not be empty");
  if (!HasBlob(sample.payload_ref)) {
    Fail(ErrorCode::kMalformedSample, "payload '" + sample.payload_ref + "' is not in the blob store");
  }
  std::lock_guard lock(IdentityMutex(identity));
  AppendLine(SamplesPath(identity, sample.modality), Json(sample).dump());
  return GetEnrollmentStatus(identity, sample.modality);
}

std::vector<BiometricSample> Registry::EnrollmentSamples(const std::string &identity, Modality m) const {
  RequireIdentity(identity);
  std::vector<BiometricSample> out;
  const fs::path p = SamplesPath(identity, m);
  if (!fs::exists(p)) return out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(Json::parse(line).get<BiometricSample>());
  }
  return out;
}

EnrollmentStatus Registry::GetEnrollmentStatus(const std::string &identity, Modality m) const {
  const auto samples = EnrollmentSamples(identity, m);
  EnrollmentStatus status = EvaluatePolicy(policies_.at(m), samples);
  status.finalized = IsEnrolled(identity, m);
  return status;
}

bool Registry::IsEnrolled(const std::string &identity, Modality m) const {
  const fs::path dir = TemplateDir(identity, m);
  std::error_code ec;
  return fs::is_directory(dir, ec) && !fs::is_empty(dir, ec);
}

std::vector<Template> Registry::FinalizeEnrollment(const std::string &identity, Modality m,
                                                   const Trainer &trainer) {
  RequireIdentity(identity);
  std::vector<Template> stored;
  {
    std::lock_guard lock(IdentityMutex(identity));
    if (IsEnrolled(identity, m)) {
      Fail(ErrorCode::kAlreadyEnrolled, "'" + identity + "' is already enrolled for " + std::string(ToString(m)));
    }
    const auto all = EnrollmentSamples(identity, m);
    const EnrollmentPolicy &policy = policies_.at(m);
    const EnrollmentStatus status = EvaluatePolicy(policy, all);
    if (!status.complete) {
      Fail(ErrorCode::kIncompleteEnrollment,
           std::to_string(status.qualifying_samples) + " qualifying sample(s) over " +
               std::to_string(status.sessions) + " session(s); policy needs " +
               std::to_string(policy.min_samples) + " over " + std::to_string(policy.min_sessions));
    }
    std::vector<BiometricSample> qualifying;
    for (const auto &s : all)
      if (s.duration_or_count >= policy.min_payload) qualifying.push_back(s);

    const std::vector<TemplateDraft> drafts = trainer(qualifying);
    if (drafts.empty()) Fail(ErrorCode::kIncompleteEnrollment, "instrument produced no templates");

    const Timestamp created = clock_();
    for (const auto &d : drafts) {
      if (!BodyMatches(m, d.body)) {
        Fail(ErrorCode::kMalformedSample, "template body does not match modality " + std::string(ToString(m)));
      }
      stored.push_back(Template{identity, m, d.session_id, d.body, created});
    }

    // Templates are staged in a sibling directory and renamed into place so
    // a crash never leaves a partial, already-"enrolled" set behind.
    const fs::path dir = TemplateDir(identity, m);
    fs::path staging = dir;
    staging += ".staging";
    fs::remove_all(staging);
    fs::create_directories(staging);
    for (std::size_t i = 0; i < stored.size(); ++i) {
      std::ostringstream name;
      name << std::setw(4) << std::setfill('0') << i << ".json";
      WriteFileAtomic(staging / name.str(), Json(stored[i]).dump());
    }
    std::error_code ec;
    fs::remove(dir, ec);  // only succeeds on an empty leftover directory
    fs::rename(staging, dir, ec);
    if (ec) Fail(ErrorCode::kStorage, "cannot publish templates: " + ec.message());
  }

  RecordAuditEvent(AuditEvent{AuditKind::kEnroll, identity, VerificationInstrumentFor(m),
                              Json{{"templates", stored.size()}, {"modality", ToString(m)}},
                              clock_()});
  return stored;
}

std::vector<Template> Registry::FetchTemplates(const std::string &identity, Modality m) const {
  RequireIdentity(identity);
  std::vector<Template> out;
  const fs::path dir = TemplateDir(identity, m);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto &f : files) out.push_back(Json::parse(ReadFile(f)).get<Template>());
  return out;
}

AuditEvent Registry::RecordAuditEvent(AuditEvent event) {
  std::lock_guard lock(audit_mutex_);
  if (!audit_loaded_) {
    for (const auto &e : ReadAuditLog()) {
      auto &last = last_event_at_[e.identity];
      last = std::max(last, e.at);
    }
    audit_loaded_ = true;
  }
  auto it = last_event_at_.find(event.identity);
  if (it != last_event_at_.end() && event.at <= it->second) {
    event.at = it->second + std::chrono::microseconds(1);
  }
  AppendLine(AuditPath(), SerializeAuditEvent(event));
  last_event_at_[event.identity] = event.at;
  return event;
}

std::vector<AuditEvent> Registry::ReadAuditLog() const {
  std::vector<AuditEvent> out;
  if (!fs::exists(AuditPath())) return out;
  std::ifstream in(AuditPath(), std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      out.push_back(ParseAuditEvent(line));
    } catch (const std::exception &e) {
      Fail(ErrorCode::kCorruptLog, "audit log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace trustauth::registry
