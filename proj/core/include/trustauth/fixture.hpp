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

#ifndef TRUSTAUTH_FIXTURE_HPP_
#define TRUSTAUTH_FIXTURE_HPP_

// End-to-end fixture: one synthetic learner's enrollment material, a genuine
// probe per modality and the attack transforms of the voice and face probes.
// The committed form is a small seed manifest; the files are regenerated
// bit-for-bit from it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trustauth/types.hpp"

namespace trustauth::fixture {

struct FixtureManifest {
  std::uint64_t seed = 2026;
  int sample_rate = 16000;
  std::string display_name = "fixture-learner";
  std::string captured_at = "2026-03-02T09:00:00.000000Z";
  int voice_enroll_samples = 15;
  int voice_sessions = 3;
  double voice_enroll_seconds = 10.0;
  double voice_probe_seconds = 5.0;
  double face_enroll_seconds = 5.0;
  double face_probe_seconds = 1.0;
  double fps = 10.0;
  int typists = 20;  // the learner is typist 0 of a seeded population
  int typing_enroll = 750;
  int typing_probe = 150;
};

void to_json(Json &j, const FixtureManifest &m);
void from_json(const Json &j, FixtureManifest &m);

struct EnrollFile {
  std::string path;  // relative to the fixture directory
  std::string session_id;
  std::string captured_at;
};

struct FixtureIndex {
  std::string display_name;
  std::string captured_at;  // probe capture time
  std::vector<EnrollFile> voice_enroll;
  EnrollFile face_enroll;
  EnrollFile typing_enroll;
  std::string voice_probe, face_probe, typing_probe;
  std::string voice_replay, face_recapture;
};

void to_json(Json &j, const FixtureIndex &x);
void from_json(const Json &j, FixtureIndex &x);

// Writes the files plus index.json under out_dir.
FixtureIndex GenerateFixture(const FixtureManifest &manifest, const std::filesystem::path &out_dir);

}  // namespace trustauth::fixture

#endif  // TRUSTAUTH_FIXTURE_HPP_
