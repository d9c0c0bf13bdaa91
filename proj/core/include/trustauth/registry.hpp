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

#ifndef TRUSTAUTH_REGISTRY_HPP_
#define TRUSTAUTH_REGISTRY_HPP_

// Identity registry, enrollment sessions, write-once template store and the
// append-only audit log. Everything lives under one data directory:
//
//   identities/<id>.json             one document per learner
//   blobs/<sha256>                   content-addressed payloads
//   samples/<id>/<modality>.jsonl    submitted enrollment samples
//   templates/<id>/<modality>/N.json write-once enrollment templates
//   audit.jsonl                      one event per line

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trustauth/crypto.hpp"
#include "trustauth/types.hpp"

namespace trustauth::registry {

struct Identity {
  std::string id;
  std::string display_name;
  Timestamp created_at;
};

struct BiometricSample {
  Modality modality = Modality::kVoice;
  std::string payload_ref;
  // Seconds for voice and face, keystroke count for keystroke streams.
  double duration_or_count = 0.0;
  Timestamp captured_at;
  std::string session_id;
};

using TemplateBody = std::variant<IVector, FaceEmbedding, TypingModel>;

bool BodyMatches(Modality m, const TemplateBody &body);

struct Template {
  std::string identity;
  Modality modality = Modality::kVoice;
  std::string session_id;
  TemplateBody body;
  Timestamp created_at;
};

// What an instrument hands back for each template it derived.
struct TemplateDraft {
  std::string session_id;
  TemplateBody body;
};

struct EnrollmentPolicy {
  Modality modality = Modality::kVoice;
  std::size_t min_samples = 1;
  std::size_t min_sessions = 1;
  // Per-sample minimum: seconds (voice, face) or keystrokes.
  double min_payload = 1.0;

  void Validate() const;
  static EnrollmentPolicy Default(Modality m);
};

std::map<Modality, EnrollmentPolicy> DefaultPolicies();

struct EnrollmentStatus {
  Modality modality = Modality::kVoice;
  std::size_t samples = 0;
  // Samples meeting the per-sample payload minimum; only these count.
  std::size_t qualifying_samples = 0;
  std::size_t sessions = 0;
  bool complete = false;
  bool finalized = false;
  std::vector<std::string> warnings;
};

// complete <=> qualifying samples >= min_samples and their distinct sessions
// >= min_sessions, where a sample qualifies when its payload >= min_payload.
EnrollmentStatus EvaluatePolicy(const EnrollmentPolicy &policy,
                                std::span<const BiometricSample> samples);

enum class AuditKind { kEnroll, kVerify, kPadCheck, kFuse };
std::string_view ToString(AuditKind k);
AuditKind ParseAuditKind(std::string_view s);

struct AuditEvent {
  AuditKind kind = AuditKind::kEnroll;
  std::string identity;
  Instrument instrument = Instrument::kVR;
  Json outcome_summary = Json::object();
  Timestamp at;

  bool operator==(const AuditEvent &) const = default;
};

std::string SerializeAuditEvent(const AuditEvent &e);
AuditEvent ParseAuditEvent(std::string_view line);

void to_json(Json &j, const Identity &id);
void from_json(const Json &j, Identity &id);
void to_json(Json &j, const BiometricSample &s);
void from_json(const Json &j, BiometricSample &s);
void to_json(Json &j, const Template &t);
void from_json(const Json &j, Template &t);
void to_json(Json &j, const EnrollmentStatus &s);

class Registry {
 public:
  using Clock = std::function<Timestamp()>;
  using Trainer = std::function<std::vector<TemplateDraft>(const std::vector<BiometricSample> &)>;

  explicit Registry(std::filesystem::path root,
                    std::map<Modality, EnrollmentPolicy> policies = DefaultPolicies(),
                    Clock clock = Now);

  const std::filesystem::path &root() const { return root_; }
  const EnrollmentPolicy &policy(Modality m) const { return policies_.at(m); }

  Identity RegisterLearner(std::string_view display_name);
  Identity GetIdentity(const std::string &id) const;
  bool HasIdentity(const std::string &id) const;

  std::string StoreBlob(std::span<const std::uint8_t> payload);
  Bytes LoadBlob(const std::string &blob_id) const;
  bool HasBlob(const std::string &blob_id) const;

  EnrollmentStatus SubmitEnrollmentSample(const std::string &identity, const BiometricSample &sample);
  EnrollmentStatus GetEnrollmentStatus(const std::string &identity, Modality m) const;
  std::vector<BiometricSample> EnrollmentSamples(const std::string &identity, Modality m) const;

  // Runs `trainer` on the qualifying samples and persists its templates.
  std::vector<Template> FinalizeEnrollment(const std::string &identity, Modality m,
                                           const Trainer &trainer);
  std::vector<Template> FetchTemplates(const std::string &identity, Modality m) const;
  bool IsEnrolled(const std::string &identity, Modality m) const;

  // Timestamps are bumped by 1us when needed so each identity's events stay
  // strictly increasing. Returns the event as stored.
  AuditEvent RecordAuditEvent(AuditEvent event);
  std::vector<AuditEvent> ReadAuditLog() const;

 private:
  std::filesystem::path IdentityPath(const std::string &id) const;
  std::filesystem::path SamplesPath(const std::string &id, Modality m) const;
  std::filesystem::path TemplateDir(const std::string &id, Modality m) const;
  std::filesystem::path AuditPath() const { return root_ / "audit.jsonl"; }
  std::mutex &IdentityMutex(const std::string &id);
  void RequireIdentity(const std::string &id) const;

  std::filesystem::path root_;
  std::map<Modality, EnrollmentPolicy> policies_;
  Clock clock_;

  mutable std::shared_mutex store_mutex_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> identity_locks_;

  std::mutex audit_mutex_;
  bool audit_loaded_ = false;
  std::map<std::string, Timestamp> last_event_at_;
};

}  // namespace trustauth::registry

#endif  // TRUSTAUTH_REGISTRY_HPP_
