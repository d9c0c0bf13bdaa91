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

#include <benchmark/benchmark.h>

#include "trustauth/audio.hpp"
#include "trustauth/iqm.hpp"
#include "trustauth/keystroke.hpp"
#include "trustauth/speaker.hpp"
#include "trustauth/synth.hpp"

namespace {

using namespace trustauth;

void BM_Mfcc(benchmark::State &state) {
  const auto buf = synth::SynthVoice(synth::RandomSpeaker(1), static_cast<double>(state.range(0)), 1);
  const audio::FrontendConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(audio::Mfcc(buf, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(buf.samples.size()));
}
BENCHMARK(BM_Mfcc)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_IVector(benchmark::State &state) {
  const int k = static_cast<int>(state.range(0)), d = 57, r = 20;
  const gmm::DiagGmm ubm(Eigen::VectorXd::Constant(k, 1.0 / k), Eigen::MatrixXd::Random(k, d),
                         Eigen::MatrixXd::Constant(k, d, 1.0));
  speaker::TotalVariabilityModel tv;
  tv.t = Eigen::MatrixXd::Random(k * d, r);
  speaker::BaumWelchStats stats;
  stats.n = Eigen::VectorXd::Constant(k, 10.0);
  stats.f = Eigen::MatrixXd::Random(k, d);
  for (auto _ : state) benchmark::DoNotOptimize(speaker::ExtractIVector(stats, ubm, tv));
}
BENCHMARK(BM_IVector)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_FrameIqms(benchmark::State &state) {
  const auto img = synth::SynthFace(synth::RandomFace(3, static_cast<int>(state.range(0))), 4);
  for (auto _ : state) benchmark::DoNotOptimize(pad::FrameIqms(img));
}
BENCHMARK(BM_FrameIqms)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TypingDistance(benchmark::State &state) {
  const auto typist = synth::TypistPopulation(2, 5).front();
  const auto model = keystroke::BuildTypingModel(synth::SynthTyping(typist, 750, 1), 750);
  const auto probe = keystroke::ExtractFeatures(synth::SynthTyping(typist, 150, 2));
  for (auto _ : state) benchmark::DoNotOptimize(keystroke::TypingDistance(model, probe));
}
BENCHMARK(BM_TypingDistance)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
