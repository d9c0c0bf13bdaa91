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

#ifndef TRUSTAUTH_ENGINE_HPP_
#define TRUSTAUTH_ENGINE_HPP_

// The instrument wiring shared by the CLI and the HTTP service. Both front
// doors translate their input into Engine calls and nothing else, so the two
// paths produce the same outcomes and reports for the same inputs.
//
// Activities live next to the registry:
//
//   activities/<id>/activity.json   {"identity": ...}
//   activities/<id>/results.jsonl   one InstrumentResult per line
//   activities/<id>/report.json     the last report built

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trustauth/audio.hpp"
#include "trustauth/crypto.hpp"
#include "trustauth/face.hpp"
#include "trustauth/pad_face.hpp"
#include "trustauth/pad_voice.hpp"
#include "trustauth/registry.hpp"
#include "trustauth/speaker.hpp"
#include "trustauth/trust.hpp"
#include "trustauth/types.hpp"

namespace trustauth {

inline constexpr const char *kListenEnv = "TRUSTAUTH_LISTEN";
inline constexpr const char *kDataDirEnv = "TRUSTAUTH_DATA_DIR";

struct ModelPaths {
  std::filesystem::path voice;  // speaker model bundle (VR)
  std::filesystem::path vra;    // one-class GMM (VRA)
  std::filesystem::path fra;    // linear IQM classifier (FRA)
};

struct ServiceConfig {
  std::string listen = "127.0.0.1:8080";
  std::filesystem::path data_dir = "trustauth-data";
  audio::FrontendConfig frontend;
  // Verification thresholds: cosine for VR and FR, scaled distance for KD.
  std::map<Instrument, double> thresholds = DefaultThresholds();
  trust::FusionConfig fusion = trust::FusionConfig::Uniform();
  std::map<Modality, registry::EnrollmentPolicy> policies = registry::DefaultPolicies();
  face::FaceOptions face;
  pad::Aggregation face_pad_aggregation = pad::Aggregation::kMedian;
  ModelPaths models;

  static std::map<Instrument, double> DefaultThresholds();
  void Validate() const;
  double threshold(Instrument i) const;
};

void to_json(Json &j, const ServiceConfig &c);
// Relative model paths and data_dir resolve against base_dir.
ServiceConfig ConfigFromJson(const Json &j, const std::filesystem::path &base_dir = {});
// Reads the file, applies TRUSTAUTH_LISTEN / TRUSTAUTH_DATA_DIR, validates.
ServiceConfig LoadConfig(const std::filesystem::path &path);
void SaveConfig(const std::filesystem::path &path, const ServiceConfig &c);
// Environment overrides alone, for running without a config file.
void ApplyEnvironment(ServiceConfig &c);

// Model bundle for VR: the front end, UBM and total-variability matrix.
Json SpeakerModelToJson(const speaker::SpeakerModel &m);
speaker::SpeakerModel SpeakerModelFromJson(const Json &j);

Json ReadJsonFile(const std::filesystem::path &path);
void WriteJsonFile(const std::filesystem::path &path, const Json &j);

// A probe or enrollment payload as it arrives: raw container bytes plus the
// context a caller may attach.
struct Submission {
  Bytes payload;
  std::string session_id = "s1";
  std::optional<Timestamp> captured_at;  // defaults to now
  std::string activity_id;               // empty: not recorded
};

struct EnrollResult {
  registry::EnrollmentStatus status;
  std::size_t templates = 0;  // nonzero once finalized
  std::string sample_ref;
};
void to_json(Json &j, const EnrollResult &r);

class Engine {
 public:
  explicit Engine(ServiceConfig config);
  ~Engine();
  Engine(const Engine &) = delete;
  Engine &operator=(const Engine &) = delete;

  const ServiceConfig &config() const { return config_; }
  registry::Registry &registry() { return *registry_; }

  // FR and KD need no model file; VR, VRA and FRA do.
  std::vector<Instrument> AvailableInstruments() const;
  bool Available(Instrument i) const;

  registry::Identity RegisterLearner(const std::string &display_name);

  // Stores the sample; finalizes once the modality's policy is satisfied.
  EnrollResult Enroll(const std::string &identity, Modality m, const Submission &s);
  trust::InstrumentResult Verify(const std::string &identity, Modality m, const Submission &s);
  // identity may be empty; it only ties the activity to a learner.
  trust::InstrumentResult Pad(Modality m, const Submission &s, const std::string &identity = {});

  trust::TrustReport BuildReport(const std::string &activity_id, const std::string &identity = {});
  // UnknownActivity when no report has been built yet.
  std::string StoredReport(const std::string &activity_id) const;
  std::vector<trust::InstrumentResult> ActivityResults(const std::string &activity_id) const;

 private:
  void RecordResult(const std::string &activity_id, const std::string &identity,
                    const trust::InstrumentResult &r);
  std::filesystem::path ActivityDir(const std::string &activity_id) const;
  std::mutex &ActivityMutex(const std::string &activity_id);

  ServiceConfig config_;
  std::unique_ptr<registry::Registry> registry_;
  face::ToyExtractor extractor_;
  std::optional<speaker::SpeakerModel> speaker_;
  std::optional<pad::OccGmm> occ_;
  std::optional<pad::LinearPadModel> face_pad_;
  std::mutex activities_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> activity_locks_;
};

// Container helpers shared with the CLI.
audio::AudioBuffer DecodeVoice(std::span<const std::uint8_t> bytes);
// A frame-sequence document or a single PGM frame (played at 1 fps).
image::FrameSequence DecodeFace(std::span<const std::uint8_t> bytes);

}  // namespace trustauth

#endif  // TRUSTAUTH_ENGINE_HPP_
