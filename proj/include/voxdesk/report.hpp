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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxdesk/emotion.hpp"
#include "voxdesk/labels.hpp"
#include "voxdesk/metrics.hpp"

namespace voxdesk {

inline constexpr const char* kReportSchema = "asya-report/1";

struct AudioInfo {
  std::string path;
  double duration_s = 0.0;
  int sample_rate = 0;

  friend bool operator==(const AudioInfo&, const AudioInfo&) = default;
};

struct SegmentRecord {
  int speaker_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  double confidence = 0.0;
  std::optional<Gender> gender;
  std::optional<EmotionDistribution> emotion;

  friend bool operator==(const SegmentRecord&, const SegmentRecord&) = default;
};

struct SpeakerRecord {
  SpeakerMetrics metrics;
  std::optional<Gender> gender;
  std::optional<double> positivity_proxy;
  std::optional<double> confidence_proxy;

  friend bool operator==(const SpeakerRecord&, const SpeakerRecord&) = default;
};

struct PipelineInfo {
  std::map<std::string, std::string> model_versions;
  double real_time_factor = 0.0;
  double median_latency_ms = 0.0;
  int n_windows = 0;
  int n_speech_windows = 0;

  friend bool operator==(const PipelineInfo&, const PipelineInfo&) = default;
};

struct AnalysisReport {
  AudioInfo audio;
  std::vector<SegmentRecord> segments;
  std::vector<SpeakerRecord> speakers;
  double total_duration_s = 0.0;
  double silence_s = 0.0;
  PipelineInfo pipeline;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

/// Pretty-printed JSON tagged with kReportSchema.
std::string serialize_report(const AnalysisReport& report);
/// Throws FormatError on malformed JSON, a missing key or a wrong schema tag.
AnalysisReport parse_report(const std::string& text);

}  // namespace voxdesk
