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

#ifndef TRUSTAUTH_SERVICE_HPP_
#define TRUSTAUTH_SERVICE_HPP_

// JSON over HTTP in front of an Engine.
//
//   GET  /health
//   POST /learners                           {"display_name"}
//   POST /learners/{id}/enroll/{modality}    {"payload", "session_id"?, "captured_at"?}
//   POST /learners/{id}/verify/{modality}    {"payload", "activity_id"?, "captured_at"?}
//   POST /pad/{modality}                     {"payload", "identity"?, "activity_id"?, "captured_at"?}
//   POST /activities/{id}/report             {"identity"?}
//   GET  /activities/{id}/report
//
// payload is base64; multipart/form-data with a "payload" part carrying the
// raw bytes is accepted as well. Errors come back as
// {"error": {"code", "message"}}.

#include <cstddef>
#include <memory>
#include <string>
#include <utility>

#include "trustauth/engine.hpp"
#include "trustauth/error.hpp"

namespace trustauth::service {

inline constexpr std::size_t kMaxPayloadBytes = 50u * 1024u * 1024u;

int HttpStatusFor(ErrorCode code);
Json ErrorBody(ErrorCode code, const std::string &message);

// "host:port"; ConfigError when malformed.
std::pair<std::string, int> ParseListen(const std::string &listen);

class Server {
 public:
  explicit Server(Engine &engine);
  ~Server();
  Server(const Server &) = delete;
  Server &operator=(const Server &) = delete;

  // Binds the configured address and returns the port (0 in the config
  // picks a free one). ConfigError on bind failure.
  int Bind();
  // Blocks until Stop().
  void Run();
  void Stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace trustauth::service

#endif  // TRUSTAUTH_SERVICE_HPP_
