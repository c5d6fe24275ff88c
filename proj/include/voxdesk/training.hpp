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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "voxdesk/diarization.hpp"
#include "voxdesk/pipeline.hpp"
#include "voxdesk/synthcorpus.hpp"

namespace voxdesk::train {

using Log = std::function<void(const std::string&)>;

struct Sample {
  nnet::Tensor<float> input;
  FrameWindow window;
  int file_index = 0;
  bool is_speech = false;
  bool is_test = false;
  int speaker = -1;
  std::optional<Gender> gender;
  std::optional<Emotion> emotion;
};

struct Dataset {
  synth::CorpusManifest manifest;
  std::filesystem::path root;
  std::vector<Sample> samples;
  // Speech windows half filled with silence, one at each end of every speech
  // file. Encoder training only; these mimic turn boundaries in conversation.
  std::vector<Sample> edge_samples;
  std::vector<AudioBuffer> audio;  // per manifest entry
};

Dataset load_dataset(const std::filesystem::path& corpus_dir, const PipelineConfig& cfg);

struct TrainConfig {
  int classifier_epochs = 20;
  int encoder_epochs = 12;
  int emotion_epochs = 400;
  double lr = 0.05;
  double margin = 0.2;
  double beta = 1.0;
  int batch_size = 16;
  int embedding_dim = 32;
  bool per_gender = true;
  bool semi_hard = false;
  bool freeze_trunk = true;
  std::uint64_t seed = 1;
};

struct StageLog {
  std::string stage;
  std::vector<double> epoch_losses;
};

/// Minibatch SGD on softmax cross-entropy; returns the mean loss per epoch.
std::vector<double> train_classifier(nnet::Model<float>& model,
                                     const std::vector<const nnet::Tensor<float>*>& inputs,
                                     const std::vector<int>& labels, int epochs, double lr,
                                     int batch_size, std::uint64_t seed, const Log& log = {});

/// Exponential-triplet metric learning through trunk and projection.
std::vector<double> train_encoder(Encoder& encoder,
                                  const std::vector<const nnet::Tensor<float>*>& inputs,
                                  const std::vector<int>& speakers, const TrainConfig& cfg,
                                  std::uint64_t seed, const Log& log = {});

/// Trains the emotion head on trunk features; the trunk is untouched when frozen.
std::vector<double> train_emotion_head(Encoder& encoder,
                                       const std::vector<const nnet::Tensor<float>*>& inputs,
                                       const std::vector<int>& labels, const TrainConfig& cfg,
                                       std::uint64_t seed, const Log& log = {});

struct TrainResult {
  CascadeBundle bundle;
  std::vector<StageLog> logs;
};

TrainResult train_cascade(const Dataset& data, const TrainConfig& cfg, const PipelineConfig& pcfg,
                          const Log& log = {});

/// Window embeddings of one utterance, tagged with the encoder route that produced them.
struct UtteranceEmbedding {
  int speaker = -1;
  Gender route = Gender::kMale;
  std::vector<Eigen::VectorXd> windows;
};

/// Nearest-centroid re-identification: enrollment centroids per (speaker, route),
/// each test utterance matched against centroids of its own route.
double reid_accuracy(const std::vector<UtteranceEmbedding>& enroll,
                     const std::vector<UtteranceEmbedding>& test);

struct EvalReport {
  double vad_accuracy = 0.0;
  double gender_accuracy = 0.0;
  double reid_accuracy = 0.0;
  double emotion_accuracy = 0.0;
  double median_latency_ms = 0.0;
  double mean_latency_ms = 0.0;
  double max_latency_ms = 0.0;
  double real_time_factor = 0.0;
  double latency_audio_s = 0.0;
  int n_test_utterances = 0;
  int n_test_windows = 0;
  double emotion_max_sum_error = 0.0;
  DistanceHistograms histograms;
  std::array<std::array<int, kNumEmotions>, kNumEmotions> emotion_confusion{};
};

struct EvalOptions {
  double latency_min_audio_s = 60.0;
  int histogram_bins = 40;
};

EvalReport evaluate(const Dataset& data, const CascadeBundle& bundle, const PipelineConfig& cfg,
                    const EvalOptions& opts = {});

std::string format_eval_table(const EvalReport& r);
std::string format_eval_csv(const EvalReport& r);
std::string format_confusion_csv(const EvalReport& r);

}  // namespace voxdesk::train
