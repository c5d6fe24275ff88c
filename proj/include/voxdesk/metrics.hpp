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

#pragma once

#include <optional>
#include <vector>

#include "voxdesk/diarization.hpp"
#include "voxdesk/dsp.hpp"
#include "voxdesk/emotion.hpp"

namespace voxdesk {

inline constexpr double kLongUtteranceS = 30.0;

struct SpeakerMetrics {
  int speaker_id = 0;
  double total_speech_s = 0.0;
  double talk_ratio = 0.0;
  int n_utterances = 0;
  double mean_utterance_s = 0.0;
  double max_utterance_s = 0.0;
  int n_30s_violations = 0;
  double tempo_syl_per_s = 0.0;

  friend bool operator==(const SpeakerMetrics&, const SpeakerMetrics&) = default;
};

struct ConversationReport {
  double total_duration_s = 0.0;
  double silence_s = 0.0;
  std::vector<SpeakerMetrics> speakers;  // ascending speaker_id

  friend bool operator==(const ConversationReport&, const ConversationReport&) = default;
};

/// Per-speaker talk time and utterance statistics. Touching same-speaker
/// segments form one utterance. Throws InvalidArgument on overlap or
/// segments outside [0, total_duration_s].
ConversationReport conversation_metrics(std::vector<DiarizationSegment> segments,
                                        double total_duration_s);

struct TempoConfig {
  double hop_s = 0.010;
  double frame_s = 0.020;
  int smooth_frames = 5;
  double min_peak_gap_s = 0.100;
  double relative_threshold = 0.5;  // of the median-to-max range
};

/// Syllable-rate estimate: peaks of the smoothed energy envelope per second.
double tempo_estimate(const AudioBuffer& audio, const DiarizationSegment& segment,
                      const TempoConfig& cfg = {});

/// Fills tempo_syl_per_s with each speaker's mean over utterances of at least 200 ms.
void attach_tempo(ConversationReport& report, const std::vector<DiarizationSegment>& segments,
                  const AudioBuffer& audio, const TempoConfig& cfg = {});

/// Derived proxies, not validated measures: positivity is P(Happiness),
/// confidence is 1 - P(Fear) - P(Sadness).
struct AffectProxies {
  double positivity = 0.0;
  double confidence = 0.0;
};

AffectProxies affect_proxies(const EmotionDistribution& d);

}  // namespace voxdesk
