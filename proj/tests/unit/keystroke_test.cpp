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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "scratch.hpp"
#include "trustauth/error.hpp"
#include "trustauth/evaluate.hpp"
#include "trustauth/keystroke.hpp"
#include "trustauth/synth.hpp"

namespace trustauth::keystroke {
namespace {

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kStorage;
}

std::vector<KeyEvent> Stream(std::uint64_t seed, int n) {
  const auto typists = synth::TypistPopulation(3, 99);
  return synth::SynthTyping(typists[seed % 3], n, seed);
}

TEST(Features, DwellAndPressToPressFlight) {
  const std::vector<KeyEvent> s{{"a", 100, 180}, {"B", 250, 300}};
  const KeystrokeFeatures f = ExtractFeatures(s);
  ASSERT_EQ(f.dwell.size(), 2u);
  EXPECT_EQ(f.dwell[0], std::make_pair(std::string("a"), 80.0));
  EXPECT_EQ(f.dwell[1].first, "b");
  ASSERT_EQ(f.flight.size(), 1u);
  EXPECT_EQ(f.flight[0], std::make_pair(PairKey("a", "b"), 150.0));
}

TEST(Features, SingleEventHasNoFlights) {
  const std::vector<KeyEvent> s{{"x", 5, 9}};
  EXPECT_EQ(ExtractFeatures(s).dwell.size(), 1u);
  EXPECT_TRUE(ExtractFeatures(s).flight.empty());
}

TEST(Features, MalformedStreams) {
  const std::vector<KeyEvent> unsorted{{"a", 100, 150}, {"b", 90, 120}};
  const std::vector<KeyEvent> negative{{"a", 100, 50}};
  EXPECT_EQ(CodeOf([&] { ExtractFeatures(unsorted); }), ErrorCode::kUnsortedStream);
  EXPECT_EQ(CodeOf([&] { ExtractFeatures(negative); }), ErrorCode::kNegativeDwell);
}

TEST(Model, BuildsFromSevenHundredFifty) {
  const TypingModel m = BuildTypingModel(Stream(1, 750), 750);
  EXPECT_EQ(m.total_keystrokes, 750u);
  EXPECT_FALSE(m.per_key_dwell.empty());
  for (const auto &[k, s] : m.per_key_dwell) EXPECT_GE(s.std, kStdFloorMs);
  EXPECT_EQ(CodeOf([&] { BuildTypingModel(Stream(1, 10), 750); }), ErrorCode::kTooFewKeystrokes);
}

TEST(Model, EqualDwellsHitTheFloor) {
  std::vector<KeyEvent> s;
  for (int i = 0; i < 60; ++i) s.push_back({"a", 100.0 * i, 100.0 * i + 80});
  const TypingModel m = BuildTypingModel(s, 50);
  EXPECT_EQ(m.per_key_dwell.at("a").std, kStdFloorMs);
  EXPECT_EQ(m.per_key_dwell.at("a").mean, 80.0);
}

TEST(Model, SampleStatistics) {
  const auto s = Stream(4, 900);
  const TypingModel m = BuildTypingModel(s, 750);
  std::vector<double> e;
  for (const auto &ev : s) {
    if (NormalizeKey(ev.key) == "e") e.push_back(ev.up_ms - ev.down_ms);
  }
  ASSERT_GT(e.size(), 3u);
  double mean = 0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double ss = 0;
  for (double v : e) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(m.per_key_dwell.at("e").mean, mean, 1e-9);
  EXPECT_NEAR(m.per_key_dwell.at("e").std, std::max(kStdFloorMs, std::sqrt(ss / static_cast<double>(e.size() - 1))), 1e-9);
  EXPECT_EQ(m.per_key_dwell.at("e").count, e.size());
}

// Independent recount: each probe feature against its entry, or the global
// statistic when the entry is missing or seen fewer than three times.
double RecountDistance(const TypingModel &m, const KeystrokeFeatures &f) {
  auto stats = [](const std::map<std::string, KeyStats> &entries, const std::string &k, const KeyStats &global) {
    const auto it = entries.find(k);
    return it != entries.end() && it->second.count >= 3 ? it->second : global;
  };
  double sum = 0;
  std::size_t n = 0;
  for (const auto &[k, x] : f.dwell) {
    const KeyStats s = stats(m.per_key_dwell, k, m.global_dwell);
    sum += std::abs(x - s.mean) / s.std;
    ++n;
  }
  for (const auto &[k, x] : f.flight) {
    const KeyStats s = stats(m.per_pair_flight, k, m.global_flight);
    sum += std::abs(x - s.mean) / s.std;
    ++n;
  }
  return sum / static_cast<double>(n);
}

TEST(Distance, MatchesRecount) {
  const TypingModel m = BuildTypingModel(Stream(2, 750), 750);
  for (std::uint64_t seed = 10; seed < 40; ++seed) {
    const KeystrokeFeatures f = ExtractFeatures(Stream(seed, 150));
    EXPECT_NEAR(TypingDistance(m, f), RecountDistance(m, f), 1e-12);
  }
}

TEST(Distance, SingleFeatureArithmetic) {
  TypingModel m;
  m.per_key_dwell["a"] = {80, 10, 5};
  m.global_dwell = {80, 10, 5};
  m.global_flight = {100, 10, 5};
  m.total_keystrokes = 750;
  KeystrokeFeatures f;
  f.dwell = {{"a", 90}};
  EXPECT_DOUBLE_EQ(TypingDistance(m, f), 1.0);
}

TEST(Distance, ProbeAtTheMeansScoresZero) {
  const TypingModel m = BuildTypingModel(Stream(3, 750), 750);
  KeystrokeFeatures f;
  for (int i = 0; i < 60; ++i) {
    for (const auto &[k, s] : m.per_key_dwell) {
      if (s.count >= kMinEntryCount) f.dwell.emplace_back(k, s.mean);
    }
  }
  const auto o = ScoreTyping(m, f, 1e-9);
  EXPECT_EQ(o.score, 0.0);
  EXPECT_TRUE(o.accepted);
}

TEST(Distance, PermutationAndAddingAMeanFeature) {
  const TypingModel m = BuildTypingModel(Stream(5, 750), 750);
  KeystrokeFeatures f = ExtractFeatures(Stream(6, 150));
  const double d = TypingDistance(m, f);
  std::reverse(f.dwell.begin(), f.dwell.end());
  std::rotate(f.flight.begin(), f.flight.begin() + 7, f.flight.end());
  EXPECT_NEAR(TypingDistance(m, f), d, 1e-12);
  const auto &[key, stats] = *m.per_key_dwell.begin();
  f.dwell.emplace_back(key, stats.count >= kMinEntryCount ? stats.mean : m.global_dwell.mean);
  EXPECT_LE(TypingDistance(m, f), d + 1e-12);
}

TEST(Distance, ShortProbeAndEmptyModel) {
  const TypingModel m = BuildTypingModel(Stream(5, 750), 750);
  EXPECT_EQ(CodeOf([&] { ScoreTyping(m, ExtractFeatures(Stream(1, 49)), 2.0); }), ErrorCode::kProbeTooShort);
  EXPECT_EQ(CodeOf([&] { ScoreTyping(TypingModel{}, ExtractFeatures(Stream(1, 60)), 2.0); }), ErrorCode::kNoModel);
}

TEST(Parsing, JsonLinesAndCsv) {
  const auto s = Stream(7, 20);
  const auto back = ParseKeyEvents(FormatKeyEventsJsonl(s));
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back[i].key, s[i].key);
    EXPECT_EQ(back[i].down_ms, s[i].down_ms);
    EXPECT_EQ(back[i].up_ms, s[i].up_ms);
  }
  const auto csv = ParseKeyEvents("key,down_ms,up_ms\nA,1,5\nshift, 6 ,9\n");
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[1].key, "shift");
  EXPECT_EQ(csv[1].down_ms, 6.0);
  EXPECT_THROW(ParseKeyEvents("{\"key\":\"a\"}\n"), Error);
}

TEST(Typing, SeparatedTypistsReachLowEer) {
  eval::KdEvalOptions o;
  o.typists = 2;
  o.probes_per_typist = 100;
  o.seed = 3;
  const auto r = eval::EvaluateKd(o);
  EXPECT_EQ(r.genuine.size(), 200u);
  EXPECT_LE(r.sweep.rates.eer, 0.05);
}

TEST(Typing, EnrollAndVerifyThroughTheRegistry) {
  testing_support::ScratchDir dir("typing");
  registry::Registry store(dir.path());
  const auto id = store.RegisterLearner("k").id;
  EXPECT_EQ(EnrollTyping(store, id, Stream(1, 750), "s1", Now()).size(), 1u);
  EXPECT_TRUE(VerifyTyping(store, id, Stream(4, 150), 2.0).accepted);
  EXPECT_EQ(CodeOf([&] { EnrollTyping(store, id, Stream(1, 750), "s1", Now()); }), ErrorCode::kAlreadyEnrolled);
}

}  // namespace
}  // namespace trustauth::keystroke
