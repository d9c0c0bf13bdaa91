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

#include "trustauth/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "trustauth/error.hpp"

namespace trustauth::audio {
namespace {

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void PutU32(Bytes &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void PutU16(Bytes &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutTag(Bytes &out, const char *tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

AudioBuffer DecodeWav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    Fail(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = ReadU32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) Fail(ErrorCode::kUnsupportedFormat, "truncated WAV chunk");
    if (std::memcmp(b.data() + pos, "fmt ", 4) == 0) {
      if (size < 16) Fail(ErrorCode::kUnsupportedFormat, "short fmt chunk");
      format = ReadU16(b, body);
      channels = ReadU16(b, body + 2);
      rate = ReadU32(b, body + 4);
      bits = ReadU16(b, body + 14);
      have_fmt = true;
    } else if (std::memcmp(b.data() + pos, "data", 4) == 0) {
      if (!have_fmt) Fail(ErrorCode::kUnsupportedFormat, "data chunk before fmt chunk");
      if (format != 1 || channels != 1 || bits != 16) {
        Fail(ErrorCode::kUnsupportedFormat, "only mono 16-bit PCM is supported");
      }
      AudioBuffer buf;
      buf.sample_rate = static_cast<int>(rate);
      buf.samples.resize(size / 2);
      for (std::size_t i = 0; i < buf.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(ReadU16(b, body + 2 * i));
        buf.samples[i] = raw / 32768.0;
      }
      buf.Validate();
      return buf;
    }
    pos = body + size + (size & 1);
  }
  Fail(ErrorCode::kUnsupportedFormat, "WAV file has no data chunk");
}

Bytes EncodeWav(const AudioBuffer &buf) {
  buf.Validate();
  const auto data_bytes = static_cast<std::uint32_t>(2 * buf.samples.size());
  Bytes out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(buf.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(buf.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double x : buf.samples) {
    const double scaled = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

AudioBuffer ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kStorage, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeWav(bytes);
}

void WriteWav(const std::filesystem::path &path, const AudioBuffer &buf) {
  const Bytes bytes = EncodeWav(buf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kStorage, "cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace trustauth::audio
