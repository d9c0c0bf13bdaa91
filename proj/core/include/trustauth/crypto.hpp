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

#ifndef TRUSTAUTH_CRYPTO_HPP_
#define TRUSTAUTH_CRYPTO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trustauth {

using Bytes = std::vector<std::uint8_t>;

// Lowercase hex SHA-256.
std::string Sha256Hex(std::span<const std::uint8_t> data);
std::string Sha256Hex(std::string_view data);

std::string Base64Encode(std::span<const std::uint8_t> data);
Bytes Base64Decode(std::string_view text);

Bytes ToBytes(std::string_view s);

}  // namespace trustauth

#endif  // TRUSTAUTH_CRYPTO_HPP_
