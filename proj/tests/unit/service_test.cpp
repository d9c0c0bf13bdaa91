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

#include <cmath>
#include <thread>

#include <gtest/gtest.h>

#include "scratch.hpp"
#include "trustauth/crypto.hpp"
#include "trustauth/engine.hpp"
#include "trustauth/service.hpp"
#include "trustauth/synth.hpp"

// After the Eigen-based headers: glibc's resolver macros clash with Eigen.
#include "httplib.h"

namespace trustauth::service {
namespace {

using testing_support::ScratchDir;

// Engine plus server on a free port, served from a background thread.
class Running {
 public:
  explicit Running(const std::filesystem::path &data_dir) : engine_(MakeConfig(data_dir)), server_(engine_) {
    port_ = server_.Bind();
    thread_ = std::thread([this] { server_.Run(); });
    for (int i = 0; i < 200 && !server_.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ~Running() {
    server_.Stop();
    thread_.join();
  }
  httplib::Client Client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  static ServiceConfig MakeConfig(const std::filesystem::path &data_dir) {
    ServiceConfig c;
    c.listen = "127.0.0.1:0";
    c.data_dir = data_dir;
    return c;
  }
  Engine engine_;
  Server server_;
  int port_ = 0;
  std::thread thread_;
};

Json Body(const httplib::Result &r) { return Json::parse(r->body); }

std::string Typing(int n, std::uint64_t seed) {
  const auto typist = synth::TypistPopulation(4, 21).front();
  const Bytes b = ToBytes(keystroke::FormatKeyEventsJsonl(synth::SynthTyping(typist, n, seed)));
  return Base64Encode(b);
}

TEST(Service, HealthListsInstruments) {
  ScratchDir dir("service");
  Running srv(dir.path());
  auto cli = srv.Client();
  const auto r = cli.Get("/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  const Json j = Body(r);
  EXPECT_EQ(j.at("status"), "ok");
  EXPECT_EQ(j.at("instruments"), (Json{"FR", "KD"}));
  EXPECT_EQ(j.at("schema"), trust::kReportSchema);
}

TEST(Service, ErrorsCarryCodes) {
  ScratchDir dir("service");
  Running srv(dir.path());
  auto cli = srv.Client();
  auto r = cli.Post("/learners/nobody/verify/keystroke", Json{{"payload", Typing(150, 1)}}.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(Body(r).at("error").at("code"), "UnknownIdentity");
  r = cli.Get("/activities/none/report");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(Body(r).at("error").at("code"), "UnknownActivity");
  r = cli.Post("/learners", "{not json", "application/json");
  EXPECT_EQ(r->status, 400);
  r = cli.Post("/learners", Json{{"display_name", " "}}.dump(), "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(Body(r).at("error").at("code"), "InvalidName");
  r = cli.Get("/no/such/route");
  EXPECT_EQ(r->status, 404);
  EXPECT_TRUE(Body(r).contains("error"));
}

TEST(Service, EnrollVerifyReportRoundTrip) {
  ScratchDir dir("service");
  Running srv(dir.path());
  auto cli = srv.Client();
  auto r = cli.Post("/learners", Json{{"display_name", "ann"}}.dump(), "application/json");
  ASSERT_EQ(r->status, 201);
  const std::string id = Body(r).at("id");

  r = cli.Post("/learners/" + id + "/enroll/keystroke", Json{{"payload", Typing(750, 1)}}.dump(), "application/json");
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_TRUE(Body(r).at("status").at("complete").get<bool>());
  r = cli.Post("/learners/" + id + "/enroll/keystroke", Json{{"payload", Typing(750, 1)}}.dump(), "application/json");
  EXPECT_EQ(r->status, 409);

  // Multipart with raw bytes works as well as base64 JSON.
  const auto typist = synth::TypistPopulation(4, 21).front();
  const std::string raw = keystroke::FormatKeyEventsJsonl(synth::SynthTyping(typist, 150, 2));
  httplib::MultipartFormDataItems form{{"payload", raw, "probe.jsonl", "application/octet-stream"},
                                       {"activity_id", "act-9", "", ""},
                                       {"captured_at", "2026-03-02T09:00:00.000000Z", "", ""}};
  r = cli.Post("/learners/" + id + "/verify/keystroke", form);
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(Body(r).at("instrument"), "KD");
  EXPECT_TRUE(Body(r).at("outcome").at("accepted").get<bool>());
  const double distance = Body(r).at("outcome").at("score");

  r = cli.Post("/activities/act-9/report", "", "application/json");
  ASSERT_EQ(r->status, 200);
  const std::string posted = r->body;
  // KD alone: the fused score is its calibrated score.
  const Json report = Json::parse(posted);
  EXPECT_NEAR(report.at("fused_score").get<double>(), std::exp(-distance), 1e-12);
  EXPECT_EQ(report.at("decision"), std::exp(-distance) >= 0.5 ? "trusted" : "untrusted");
  r = cli.Get("/activities/act-9/report");
  EXPECT_EQ(r->body, posted);
}

TEST(Service, StatusMapping) {
  EXPECT_EQ(HttpStatusFor(ErrorCode::kUnknownIdentity), 404);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kAlreadyEnrolled), 409);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kUnsupportedFormat), 415);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kInstrumentUnavailable), 503);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kAllSilent), 422);
  EXPECT_EQ(ParseListen("127.0.0.1:80"), (std::pair<std::string, int>{"127.0.0.1", 80}));
  EXPECT_THROW(ParseListen("127.0.0.1"), Error);
  EXPECT_THROW(ParseListen("h:99999"), Error);
  EXPECT_THROW(ParseListen("h:12x"), Error);
}

}  // namespace
}  // namespace trustauth::service
