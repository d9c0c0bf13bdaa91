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

#include "trustauth/service.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <string>

#include "httplib.h"
#include "trustauth/crypto.hpp"

namespace trustauth::service {
namespace {

constexpr const char *kJsonType = "application/json";

// Request fields from either a JSON body or multipart form parts.
struct RequestFields {
  Json body = Json::object();
  Bytes payload;
  bool has_payload = false;

  std::string Str(const char *key) const {
    if (!body.contains(key)) return {};
    if (!body.at(key).is_string()) Fail(ErrorCode::kInvalidArgument, std::string(key) + " must be a string");
    return body.at(key).get<std::string>();
  }
};

RequestFields ParseFields(const httplib::Request &req) {
  RequestFields f;
  if (req.is_multipart_form_data()) {
    for (const auto &[name, part] : req.files) {
      if (name == "payload") {
        f.payload = ToBytes(part.content);
        f.has_payload = true;
      } else {
        f.body[name] = part.content;
      }
    }
    return f;
  }
  if (!req.body.empty()) {
    try {
      f.body = Json::parse(req.body);
    } catch (const Json::exception &e) {
      Fail(ErrorCode::kInvalidArgument, std::string("request body is not JSON: ") + e.what());
    }
    if (!f.body.is_object()) Fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  }
  if (f.body.contains("payload")) {
    f.payload = Base64Decode(f.Str("payload"));
    f.has_payload = true;
  }
  return f;
}

Submission ToSubmission(const RequestFields &f) {
  if (!f.has_payload) Fail(ErrorCode::kInvalidArgument, "missing payload");
  Submission s;
  s.payload = f.payload;
  if (const auto v = f.Str("session_id"); !v.empty()) s.session_id = v;
  if (const auto v = f.Str("captured_at"); !v.empty()) s.captured_at = ParseTimestamp(v);
  s.activity_id = f.Str("activity_id");
  return s;
}

void SendJson(httplib::Response &res, int status, const Json &j) {
  res.status = status;
  res.set_content(j.dump() + "\n", kJsonType);
}

// Runs a handler and turns library errors into JSON error bodies.
httplib::Server::Handler Guard(std::function<void(const httplib::Request &, httplib::Response &)> fn) {
  return [fn = std::move(fn)](const httplib::Request &req, httplib::Response &res) {
    try {
      fn(req, res);
    } catch (const Error &e) {
      SendJson(res, HttpStatusFor(e.code()), ErrorBody(e.code(), e.detail()));
    } catch (const Json::exception &e) {
      SendJson(res, 400, ErrorBody(ErrorCode::kInvalidArgument, e.what()));
    } catch (const std::exception &e) {
      SendJson(res, 500, ErrorBody(ErrorCode::kStorage, e.what()));
    }
  };
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownIdentity:
    case ErrorCode::kUnknownActivity: return 404;
    case ErrorCode::kAlreadyEnrolled:
    case ErrorCode::kNotEnrolled:
    case ErrorCode::kNoModel:
    case ErrorCode::kIncompleteEnrollment: return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidName: return 400;
    case ErrorCode::kUnsupportedFormat: return 415;
    case ErrorCode::kInstrumentUnavailable: return 503;
    case ErrorCode::kStorage:
    case ErrorCode::kCorruptLog:
    case ErrorCode::kConfig: return 500;
    default: return 422;
  }
}

Json ErrorBody(ErrorCode code, const std::string &message) {
  return Json{{"error", {{"code", ErrorCodeName(code)}, {"message", message}}}};
}

std::pair<std::string, int> ParseListen(const std::string &listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) Fail(ErrorCode::kConfig, "listen must be host:port, got '" + listen + "'");
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(listen.substr(colon + 1), &used);
    if (used != listen.size() - colon - 1) port = -1;
  } catch (const std::exception &) {
    port = -1;
  }
  if (port < 0 || port > 65535) Fail(ErrorCode::kConfig, "bad port in '" + listen + "'");
  return {listen.substr(0, colon), port};
}

struct Server::Impl {
  Engine &engine;
  httplib::Server http;
  std::atomic<bool> bound{false};

  explicit Impl(Engine &e) : engine(e) {
    http.set_payload_max_length(kMaxPayloadBytes);
    Routes();
  }

  void Routes() {
    http.Get("/health", Guard([this](const httplib::Request &, httplib::Response &res) {
      Json instruments = Json::array();
      for (Instrument i : engine.AvailableInstruments()) instruments.push_back(ToString(i));
      SendJson(res, 200, Json{{"status", "ok"}, {"instruments", instruments}, {"schema", trust::kReportSchema}});
    }));

    http.Post("/learners", Guard([this](const httplib::Request &req, httplib::Response &res) {
      const RequestFields f = ParseFields(req);
      SendJson(res, 201, Json(engine.RegisterLearner(f.Str("display_name"))));
    }));

    http.Post(R"(/learners/([^/]+)/enroll/([^/]+))", Guard([this](const httplib::Request &req, httplib::Response &res) {
      const Modality m = ParseModality(req.matches[2].str());
      const Submission s = ToSubmission(ParseFields(req));
      SendJson(res, 200, Json(engine.Enroll(req.matches[1].str(), m, s)));
    }));

    http.Post(R"(/learners/([^/]+)/verify/([^/]+))", Guard([this](const httplib::Request &req, httplib::Response &res) {
      const Modality m = ParseModality(req.matches[2].str());
      const Submission s = ToSubmission(ParseFields(req));
      SendJson(res, 200, Json(engine.Verify(req.matches[1].str(), m, s)));
    }));

    http.Post(R"(/pad/([^/]+))", Guard([this](const httplib::Request &req, httplib::Response &res) {
      const Modality m = ParseModality(req.matches[1].str());
      const RequestFields f = ParseFields(req);
      SendJson(res, 200, Json(engine.Pad(m, ToSubmission(f), f.Str("identity"))));
    }));

    // Reports go out exactly as serialized so every path yields the same bytes.
    http.Post(R"(/activities/([^/]+)/report)", Guard([this](const httplib::Request &req, httplib::Response &res) {
      const RequestFields f = ParseFields(req);
      const auto report = engine.BuildReport(req.matches[1].str(), f.Str("identity"));
      res.status = 200;
      res.set_content(trust::SerializeReport(report), kJsonType);
    }));

    http.Get(R"(/activities/([^/]+)/report)", Guard([this](const httplib::Request &req, httplib::Response &res) {
      res.status = 200;
      res.set_content(engine.StoredReport(req.matches[1].str()), kJsonType);
    }));

    http.set_error_handler([](const httplib::Request &, httplib::Response &res) {
      if (!res.body.empty()) return;
      const std::string msg = res.status == 413 ? "payload exceeds 50 MB" : httplib::status_message(res.status);
      res.set_content(ErrorBody(ErrorCode::kInvalidArgument, msg).dump() + "\n", kJsonType);
    });
  }
};

Server::Server(Engine &engine) : impl_(std::make_unique<Impl>(engine)) {}

Server::~Server() { Stop(); }

int Server::Bind() {
  const auto [host, port] = ParseListen(impl_->engine.config().listen);
  int bound_port = port;
  if (port == 0) {
    bound_port = impl_->http.bind_to_any_port(host);
    if (bound_port <= 0) Fail(ErrorCode::kConfig, "cannot bind " + host + ":0");
  } else if (!impl_->http.bind_to_port(host, port)) {
    Fail(ErrorCode::kConfig, "cannot bind " + impl_->engine.config().listen);
  }
  impl_->bound = true;
  return bound_port;
}

void Server::Run() {
  if (!impl_->bound) Bind();
  impl_->http.listen_after_bind();
}

void Server::Stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

bool Server::running() const { return impl_->http.is_running(); }

}  // namespace trustauth::service
