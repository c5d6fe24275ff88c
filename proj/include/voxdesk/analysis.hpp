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
#include <string>
#include <vector>

#include "voxdesk/diarization.hpp"
#include "voxdesk/metrics.hpp"
#include "voxdesk/pipeline.hpp"
#include "voxdesk/report.hpp"

namespace voxdesk {

struct AnalyzeOptions {
  double tau = 0.1;
  double d_new = 0.6;
  TempoConfig tempo;
};

struct AnalysisResult {
  std::vector<FrameAnnotation> annotations;
  std::vector<LabeledWindow> windows;  // aligned with annotations
  std::vector<DiarizationSegment> segments;
  ConversationReport conversation;
  std::vector<Eigen::VectorXd> embeddings;  // speech windows, in time order
  std::vector<int> embedding_speakers;      // aligned with embeddings
  std::map<int, Gender> speaker_gender;
  double real_time_factor = 0.0;
  double median_latency_ms = 0.0;
};

/// Cascade, online speaker assignment (one registry per encoder route),
/// segmentation and conversation metrics. Speaker ids are global, in order
/// of first appearance.
AnalysisResult analyze_audio(const AudioBuffer& audio, const CascadeBundle& bundle,
                             const PipelineConfig& cfg = {}, const AnalyzeOptions& opts = {});

AnalysisReport make_report(const AnalysisResult& result, const AudioBuffer& audio,
                           const std::string& path, const CascadeBundle& bundle);

/// "kind,bin_lo,bin_hi,count" rows for intra and inter distance histograms.
std::string histogram_csv(const DistanceHistograms& h);
/// "speaker_id,x,y,z" rows of the spherical 3-D projection.
std::string projection_csv(const std::vector<Eigen::Vector3d>& points, const std::vector<int>& speakers);

}  // namespace voxdesk
