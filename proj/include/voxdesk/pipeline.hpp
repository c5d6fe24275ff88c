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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "voxdesk/dsp.hpp"
#include "voxdesk/emotion.hpp"
#include "voxdesk/labels.hpp"
#include "voxdesk/nnet/model.hpp"

namespace voxdesk {

enum class VadLabel : std::uint8_t { kNoise = 0, kSpeech = 1 };

/// Fixed affine map applied to log-mel values before any model: (x + offset) / scale.
struct FeatureNorm {
  double offset = 5.0;
  double scale = 5.0;
};

struct PipelineConfig {
  FrameConfig frame;
  int sample_rate_hz = 16000;
  double window_s = 1.0;
  double hop_s = 0.5;
  double gate_dbfs = -60.0;
  FeatureNorm norm;

  int window_samples() const;
  int hop_samples() const;
  int patch_frames() const;
  nnet::Shape input_shape() const { return {1, frame.n_mels, patch_frames()}; }
  void validate() const;
};

struct FrameWindow {
  Eigen::MatrixXd mel_patch;  // n_mels x patch_frames
  double start_time_s = 0.0;
  double rms_dbfs = 0.0;
};

enum class GateDecision : std::uint8_t { kCandidate, kRejected };

struct ClassDecision {
  int label = 0;
  double p = 0.0;
  Eigen::VectorXd probs;
};

struct FrameAnnotation {
  FrameWindow window;
  bool gated = false;  // rejected by the energy gate
  VadLabel vad = VadLabel::kNoise;
  double vad_p = 1.0;
  std::optional<Gender> gender;
  double gender_p = 0.0;
  std::optional<Eigen::VectorXd> embedding;
  std::optional<EmotionDistribution> emotion;
  double latency_ms = 0.0;

  bool is_speech() const { return vad == VadLabel::kSpeech; }
};

/// Speaker encoder split at the pooled features so the emotion head can share the trunk.
struct Encoder {
  nnet::Model<float> trunk;
  nnet::Model<float> projection;
  std::optional<nnet::Model<float>> emotion_head;
};

struct CascadeBundle {
  nnet::Model<float> vad;
  nnet::Model<float> gender;
  std::optional<Encoder> shared;
  std::optional<Encoder> male;
  std::optional<Encoder> female;

  const Encoder& encoder_for(Gender g) const;
  Encoder& encoder_for(Gender g);
  bool per_gender() const { return !shared.has_value(); }
};

// Architectures used throughout training and inference.
nnet::Model<float> make_window_classifier(const PipelineConfig& cfg, int n_classes,
                                          std::uint64_t seed, std::string tag);
nnet::Model<float> make_trunk(const PipelineConfig& cfg, std::uint64_t seed, std::string tag);
nnet::Model<float> make_projection(const nnet::Model<float>& trunk, int embedding_dim,
                                   std::uint64_t seed, std::string tag);
Encoder make_encoder(const PipelineConfig& cfg, int embedding_dim, std::uint64_t seed,
                     const std::string& route);
/// Untrained bundle with freshly initialized weights.
CascadeBundle make_bundle(const PipelineConfig& cfg, int embedding_dim, std::uint64_t seed,
                          bool per_gender = true);

void save_bundle(const CascadeBundle& bundle, const std::filesystem::path& dir);
CascadeBundle load_bundle(const std::filesystem::path& dir);

nnet::Tensor<float> window_input(const FrameWindow& window, const FeatureNorm& norm);

FrameWindow make_window(std::span<const double> samples, double start_time_s,
                        const LogMelAnalyzer& analyzer);

GateDecision energy_gate(const FrameWindow& window, double threshold_dbfs = -60.0);

/// label 1 = speech, 0 = noise.
ClassDecision classify_vad(const FrameWindow& window, const nnet::Model<float>& model,
                           const FeatureNorm& norm = {});
/// label 0 = male, 1 = female. Requires a speech annotation.
ClassDecision classify_gender(const FrameAnnotation& annotation, const nnet::Model<float>& model,
                              const FeatureNorm& norm = {});

nnet::Tensor<float> trunk_features(const FrameWindow& window, const nnet::Model<float>& trunk,
                                   const FeatureNorm& norm = {});
Eigen::VectorXd embed_frame(const FrameAnnotation& annotation, const Encoder& encoder,
                            const FeatureNorm& norm = {});

/// Runs the cascade on one window: gate, VAD, gender, embedding, emotion.
FrameAnnotation annotate_window(FrameWindow window, const CascadeBundle& bundle,
                                const PipelineConfig& cfg);

/// Incremental front end: accepts arbitrary chunks and emits annotations in time order.
class StreamProcessor {
 public:
  StreamProcessor(const CascadeBundle& bundle, PipelineConfig cfg);

  std::vector<FrameAnnotation> push(std::span<const double> samples);
  std::int64_t samples_seen() const { return consumed_ + static_cast<std::int64_t>(buffer_.size()); }
  int windows_emitted() const { return emitted_; }

 private:
  const CascadeBundle& bundle_;
  PipelineConfig cfg_;
  LogMelAnalyzer analyzer_;
  std::vector<double> buffer_;
  std::int64_t consumed_ = 0;  // absolute index of buffer_[0]
  int emitted_ = 0;
};

int window_count(std::int64_t n_samples, const PipelineConfig& cfg);

std::vector<FrameAnnotation> process_stream(const AudioBuffer& audio, const CascadeBundle& bundle,
                                            const PipelineConfig& cfg = {});

}  // namespace voxdesk
