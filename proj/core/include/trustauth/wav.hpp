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

#ifndef TRUSTAUTH_WAV_HPP_
#define TRUSTAUTH_WAV_HPP_

// Mono 16-bit PCM RIFF/WAVE only.

#include <filesystem>
#include <span>

#include "trustauth/audio.hpp"
#include "trustauth/crypto.hpp"

namespace trustauth::audio {

AudioBuffer DecodeWav(std::span<const std::uint8_t> bytes);
Bytes EncodeWav(const AudioBuffer &buf);

AudioBuffer ReadWav(const std::filesystem::path &path);
void WriteWav(const std::filesystem::path &path, const AudioBuffer &buf);

}  // namespace trustauth::audio

#endif  // TRUSTAUTH_WAV_HPP_
