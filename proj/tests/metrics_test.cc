// Copyright 2026 The voxdesk Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "voxdesk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

namespace voxdesk {
namespace {

// Carrier tone with a raised-cosine envelope: one envelope maximum per modulation cycle.
AudioBuffer AmTone(double seconds, double mod_hz, double amplitude = 0.9) {
  AudioBuffer a;
  a.sample_rate_hz = 16000;
  a.samples.resize(static_cast<Eigen::Index>(seconds * 16000));
  for (Eigen::Index i = 0; i < a.samples.size(); ++i) {
    const double t = i / 16000.0;
    const double env = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * mod_hz * t));
    a.samples[i] = amplitude * env * std::sin(2.0 * std::numbers::pi * 300.0 * t);
  }
  return a;
}

const SpeakerMetrics& Speaker(const ConversationReport& r, int id) {
  return *std::find_if(r.speakers.begin(), r.speakers.end(), [&](const auto& m) { return m.speaker_id == id; });
}

TEST(ConversationTest, TalkRatios) {
  const auto r = conversation_metrics({{0, 0.0, 40.0, 1.0}, {1, 40.0, 60.0, 1.0}}, 60.0);
  ASSERT_EQ(r.speakers.size(), 2u);
  EXPECT_NEAR(Speaker(r, 0).talk_ratio, 0.667, 5e-4);
  EXPECT_NEAR(Speaker(r, 1).talk_ratio, 0.333, 5e-4);
  EXPECT_DOUBLE_EQ(r.silence_s, 0.0);
  EXPECT_EQ(Speaker(r, 0).n_30s_violations, 1);
  EXPECT_EQ(Speaker(r, 1).n_30s_violations, 0);
}

TEST(ConversationTest, ThirtySecondRule) {
  EXPECT_EQ(conversation_metrics({{0, 0.0, 35.0, 1.0}}, 40.0).speakers[0].n_30s_violations, 1);
  EXPECT_EQ(conversation_metrics({{0, 0.0, 30.0, 1.0}}, 40.0).speakers[0].n_30s_violations, 0);
  // 70 touching half-second windows form one 35 s utterance.
  std::vector<DiarizationSegment> pieces;
  for (int i = 0; i < 70; ++i) pieces.push_back({4, 0.5 * i, 0.5 * (i + 1), 0.9});
  const auto r = conversation_metrics(pieces, 40.0);
  EXPECT_EQ(r.speakers[0].n_utterances, 1);
  EXPECT_NEAR(r.speakers[0].max_utterance_s, 35.0, 1e-9);
  EXPECT_EQ(r.speakers[0].n_30s_violations, 1);
}

TEST(ConversationTest, EmptyIsAllSilence) {
  const auto r = conversation_metrics({}, 12.5);
  EXPECT_TRUE(r.speakers.empty());
  EXPECT_DOUBLE_EQ(r.silence_s, 12.5);
  EXPECT_DOUBLE_EQ(r.total_duration_s, 12.5);
}

TEST(ConversationTest, UtteranceStatistics) {
  const auto r = conversation_metrics({{0, 0.0, 2.0, 1}, {1, 2.0, 3.0, 1}, {0, 3.0, 7.0, 1}, {0, 8.0, 9.0, 1}}, 10.0);
  const auto& a = Speaker(r, 0);
  EXPECT_EQ(a.n_utterances, 3);
  EXPECT_DOUBLE_EQ(a.total_speech_s, 7.0);
  EXPECT_NEAR(a.mean_utterance_s, 7.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(a.max_utterance_s, 4.0);
  EXPECT_NEAR(r.silence_s, 2.0, 1e-12);
}

TEST(ConversationTest, Errors) {
  EXPECT_THROW(conversation_metrics({{0, 0.0, 2.0, 1}, {1, 1.5, 3.0, 1}}, 10.0), InvalidArgument);
  EXPECT_THROW(conversation_metrics({{0, 0.0, 12.0, 1}}, 10.0), InvalidArgument);
  EXPECT_THROW(conversation_metrics({{0, -1.0, 1.0, 1}}, 10.0), InvalidArgument);
  EXPECT_THROW(conversation_metrics({}, -1.0), InvalidArgument);
}

TEST(ConversationTest, PermutationInvariantAndDurationsAddUp) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DiarizationSegment> segs;
    double t = 0.0;
    for (int i = 0; i < 20; ++i) {
      t += 0.5 * (rng() % 3);
      const double len = 0.5 * (1 + rng() % 6);
      segs.push_back({static_cast<int>(rng() % 3), t, t + len, 0.7});
      t += len;
    }
    const double total = t + 1.0;
    const auto ref = conversation_metrics(segs, total);
    double sum = ref.silence_s, ratios = 0.0;
    for (const auto& m : ref.speakers) {
      sum += m.total_speech_s;
      ratios += m.talk_ratio;
      EXPECT_GE(m.total_speech_s, 0.0);
    }
    EXPECT_NEAR(sum, total, 1e-6);
    EXPECT_LE(ratios, 1.0 + 1e-12);
    std::shuffle(segs.begin(), segs.end(), rng);
    EXPECT_EQ(conversation_metrics(segs, total), ref);
  }
}

TEST(TempoTest, SilenceIsZero) {
  AudioBuffer a;
  a.sample_rate_hz = 16000;
  a.samples = Eigen::VectorXd::Zero(32000);
  EXPECT_DOUBLE_EQ(tempo_estimate(a, {0, 0.0, 2.0, 1.0}), 0.0);
}

TEST(TempoTest, ModulationRate) {
  const double four = tempo_estimate(AmTone(2.0, 4.0), {0, 0.0, 2.0, 1.0});
  EXPECT_NEAR(four, 4.0, 0.5);
  const double eight = tempo_estimate(AmTone(2.0, 8.0), {0, 0.0, 2.0, 1.0});
  EXPECT_NEAR(eight, 2.0 * four, 0.5);
}

TEST(TempoTest, GainInvariant) {
  const auto base = AmTone(3.0, 5.0);
  const DiarizationSegment seg{0, 0.5, 2.75, 1.0};
  const double ref = tempo_estimate(base, seg);
  for (double gain : {0.5, 0.1, 0.01}) {
    AudioBuffer scaled = base;
    scaled.samples *= gain;
    EXPECT_DOUBLE_EQ(tempo_estimate(scaled, seg), ref) << gain;
  }
}

TEST(TempoTest, Errors) {
  const auto a = AmTone(1.0, 4.0);
  EXPECT_THROW(tempo_estimate(a, {0, 0.0, 0.15, 1.0}), TooShortError);
  EXPECT_THROW(tempo_estimate(a, {0, 0.5, 1.5, 1.0}), InvalidArgument);
}

TEST(TempoTest, AttachAveragesPerSpeaker) {
  const auto a = AmTone(4.0, 4.0);
  const std::vector<DiarizationSegment> segs = {{0, 0.0, 2.0, 1}, {1, 2.0, 2.1, 1}, {0, 2.1, 4.0, 1}};
  auto r = conversation_metrics(segs, 4.0);
  attach_tempo(r, segs, a);
  const double expect = 0.5 * (tempo_estimate(a, segs[0]) + tempo_estimate(a, segs[2]));
  EXPECT_DOUBLE_EQ(Speaker(r, 0).tempo_syl_per_s, expect);
  EXPECT_DOUBLE_EQ(Speaker(r, 1).tempo_syl_per_s, 0.0);  // only a sub-200 ms segment
}

TEST(AffectProxyTest, Definitions) {
  EmotionDistribution d;
  d.p = {0.4, 0.1, 0.05, 0.15, 0.05, 0.1, 0.1, 0.05};
  const auto a = affect_proxies(d);
  EXPECT_DOUBLE_EQ(a.positivity, 0.4);
  EXPECT_NEAR(a.confidence, 0.75, 1e-15);
}

}  // namespace
}  // namespace voxdesk
