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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

#include "scratch.hpp"
#include "trustauth/engine.hpp"

namespace trustauth {
namespace {

using testing_support::ScratchDir;

struct CliRun {
  int exit_code = -1;
  std::string output;  // stdout, plus stderr when merged
};

CliRun Cli(const std::string &args, bool merge_stderr = false) {
  const std::string cmd = std::string("\"") + TRUSTAUTH_CLI + "\" " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  CliRun r;
  FILE *p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int status = ::pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Q(const std::filesystem::path &p) { return "\"" + p.string() + "\""; }

TEST(Cli, UnknownFlagIsAUsageError) {
  const CliRun r = Cli("verify --bogus 1", true);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("Usage"), std::string::npos) << r.output;
  EXPECT_EQ(Cli("", true).exit_code, 2);
}

TEST(Cli, DomainErrorsExitWithOne) {
  ScratchDir dir("cli");
  {
    std::ofstream(dir / "x.jsonl") << "{}\n";
  }
  const CliRun r = Cli("--data-dir " + Q(dir / "data") + " verify --learner nobody --modality keystroke --sample " +
                        Q(dir / "x.jsonl"),
                    true);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("UnknownIdentity"), std::string::npos) << r.output;
}

TEST(Cli, EvaluateKeystrokesPrintsRates) {
  ScratchDir dir("cli");
  const CliRun r = Cli("evaluate --instrument kd --speakers 4 --seed 3 --det-csv " + Q(dir / "det.csv"));
  ASSERT_EQ(r.exit_code, 0);
  const Json j = Json::parse(r.output);
  EXPECT_EQ(j.at("instrument"), "KD");
  EXPECT_GE(j.at("eer").get<double>(), 0.0);
  EXPECT_LE(j.at("eer").get<double>(), 1.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "det.csv"));
}

TEST(Cli, TypingEnrollVerifyReport) {
  ScratchDir dir("cli");
  const std::string data = "--data-dir " + Q(dir / "data") + " ";
  ASSERT_EQ(Cli("simulate typing --keystrokes 750 --seed 1 --out " + Q(dir / "enroll.jsonl")).exit_code, 0);
  ASSERT_EQ(Cli("simulate typing --keystrokes 150 --seed 2 --out " + Q(dir / "probe.jsonl")).exit_code, 0);
  const CliRun en = Cli(data + "enroll --name ann --modality keystroke --sample " + Q(dir / "enroll.jsonl"));
  ASSERT_EQ(en.exit_code, 0);
  const std::string id = Json::parse(en.output).at("identity");
  const CliRun ve = Cli(data + "verify --learner " + id + " --modality keystroke --activity a1 --sample " +
                     Q(dir / "probe.jsonl") + " --captured-at 2026-03-02T09:00:00.000000Z");
  ASSERT_EQ(ve.exit_code, 0);
  EXPECT_TRUE(Json::parse(ve.output).at("outcome").at("accepted").get<bool>());
  const double distance = Json::parse(ve.output).at("outcome").at("score");
  const CliRun rep = Cli(data + "report --activity a1");
  ASSERT_EQ(rep.exit_code, 0);
  const Json report = Json::parse(rep.output);
  EXPECT_NEAR(report.at("fused_score").get<double>(), std::exp(-distance), 1e-12);
  EXPECT_EQ(report.at("decision"), std::exp(-distance) >= 0.5 ? "trusted" : "untrusted");
  EXPECT_EQ(Cli(data + "report --activity a1 --stored").output, rep.output);
}

TEST(Cli, CalibrateWritesTheThresholdUsedByVerify) {
  ScratchDir dir("cli");
  {
    std::ofstream(dir / "cfg.json") << Json{{"data_dir", "data"}}.dump();
  }
  const CliRun r = Cli("--config " + Q(dir / "cfg.json") + " calibrate --instrument kd --target eer --speakers 4 --seed 5");
  ASSERT_EQ(r.exit_code, 0);
  const double t = Json::parse(r.output).at("threshold").get<double>();
  EXPECT_GT(t, 0.0);
  const ServiceConfig cfg = LoadConfig(dir / "cfg.json");
  EXPECT_EQ(cfg.threshold(Instrument::kKD), t);
  EXPECT_EQ(cfg.data_dir, dir / "data");
  EXPECT_EQ(Cli("calibrate --instrument kd", true).exit_code, 2);
}

}  // namespace
}  // namespace trustauth
