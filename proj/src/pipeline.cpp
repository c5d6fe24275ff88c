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

#include "voxdesk/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "voxdesk/nnet/checkpoint.hpp"
#include "voxdesk/nnet/losses.hpp"

namespace voxdesk {

int PipelineConfig::window_samples() const {
  return static_cast<int>(std::lround(window_s * sample_rate_hz));
}

int PipelineConfig::hop_samples() const {
  return static_cast<int>(std::lround(hop_s * sample_rate_hz));
}

int PipelineConfig::patch_frames() const { return frame_count(window_samples(), frame); }

void PipelineConfig::validate() const {
  frame.validate(sample_rate_hz);
  if (!(window_s > 0.0) || !(hop_s > 0.0)) throw ConfigError("window and hop must be positive");
  if (hop_samples() <= 0 || window_samples() < frame.window_len_samples) {
    throw ConfigError("pipeline window shorter than one analysis frame");
  }
  if (!(norm.scale > 0.0)) throw ConfigError("feature scale must be positive");
}

const Encoder& CascadeBundle::encoder_for(Gender g) const {
  if (shared) return *shared;
  const auto& e = g == Gender::kMale ? male : female;
  if (!e) throw ModelError("bundle has no " + std::string(to_string(g)) + " encoder");
  return *e;
}

Encoder& CascadeBundle::encoder_for(Gender g) {
  return const_cast<Encoder&>(std::as_const(*this).encoder_for(g));
}

nnet::Model<float> make_window_classifier(const PipelineConfig& cfg, int n_classes,
                                          std::uint64_t seed, std::string tag) {
  nnet::Model<float> m(cfg.input_shape(), seed, std::move(tag));
  m.conv2d("conv1", 8, 3, 3, 1, 2).relu()
      .conv2d("conv2", 16, 3, 3, 2, 2).relu()
      .global_avg_pool(nnet::PoolAxes::kTime)
      .dense("out", n_classes)
      .softmax();
  return m;
}

nnet::Model<float> make_trunk(const PipelineConfig& cfg, std::uint64_t seed, std::string tag) {
  nnet::Model<float> m(cfg.input_shape(), seed, std::move(tag));
  m.conv2d("conv1", 16, 3, 3, 1, 1).relu()
      .conv2d("conv2", 32, 3, 3, 2, 2).relu()
      .conv2d("conv3", 32, 3, 3, 1, 2).relu()
      .global_avg_pool(nnet::PoolAxes::kTime);
  return m;
}

nnet::Model<float> make_projection(const nnet::Model<float>& trunk, int embedding_dim,
                                   std::uint64_t seed, std::string tag) {
  nnet::Model<float> m(trunk.output_shape(), seed, std::move(tag));
  m.dense("embed", embedding_dim).l2_normalize();
  return m;
}

Encoder make_encoder(const PipelineConfig& cfg, int embedding_dim, std::uint64_t seed,
                     const std::string& route) {
  Encoder e;
  e.trunk = make_trunk(cfg, mix_seed(seed, 1), "trunk_" + route);
  e.projection = make_projection(e.trunk, embedding_dim, mix_seed(seed, 2), "projection_" + route);
  e.emotion_head = make_emotion_head(static_cast<int>(nnet::element_count(e.trunk.output_shape())),
                                     mix_seed(seed, 3));
  e.emotion_head->set_tag("emotion_" + route);
  return e;
}

CascadeBundle make_bundle(const PipelineConfig& cfg, int embedding_dim, std::uint64_t seed,
                          bool per_gender) {
  CascadeBundle b;
  b.vad = make_window_classifier(cfg, 2, mix_seed(seed, 10), "vad");
  b.gender = make_window_classifier(cfg, 2, mix_seed(seed, 11), "gender");
  if (per_gender) {
    b.male = make_encoder(cfg, embedding_dim, mix_seed(seed, 12), "male");
    b.female = make_encoder(cfg, embedding_dim, mix_seed(seed, 13), "female");
  } else {
    b.shared = make_encoder(cfg, embedding_dim, mix_seed(seed, 14), "shared");
  }
  return b;
}

namespace {

void save_encoder(const Encoder& e, const std::filesystem::path& dir, const std::string& route) {
  nnet::save_model(e.trunk, dir / ("trunk_" + route + ".ckpt"));
  nnet::save_model(e.projection, dir / ("projection_" + route + ".ckpt"));
  if (e.emotion_head) nnet::save_model(*e.emotion_head, dir / ("emotion_" + route + ".ckpt"));
}

Encoder load_encoder(const std::filesystem::path& dir, const std::string& route) {
  Encoder e;
  e.trunk = nnet::load_model<float>(dir / ("trunk_" + route + ".ckpt"));
  e.projection = nnet::load_model<float>(dir / ("projection_" + route + ".ckpt"));
  if (e.projection.input_shape() != e.trunk.output_shape()) {
    throw ModelError("projection_" + route + " does not fit trunk_" + route);
  }
  const auto head = dir / ("emotion_" + route + ".ckpt");
  if (std::filesystem::exists(head)) {
    e.emotion_head = nnet::load_model<float>(head);
    if (e.emotion_head->input_shape() != e.trunk.output_shape()) {
      throw ModelError("emotion_" + route + " does not fit trunk_" + route);
    }
  }
  return e;
}

}  // namespace

void save_bundle(const CascadeBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory '" + dir.string() + "'");
  nnet::save_model(bundle.vad, dir / "vad.ckpt");
  nnet::save_model(bundle.gender, dir / "gender.ckpt");
  if (bundle.shared) save_encoder(*bundle.shared, dir, "shared");
  if (bundle.male) save_encoder(*bundle.male, dir, "male");
  if (bundle.female) save_encoder(*bundle.female, dir, "female");
}

CascadeBundle load_bundle(const std::filesystem::path& dir) {
  CascadeBundle b;
  b.vad = nnet::load_model<float>(dir / "vad.ckpt");
  b.gender = nnet::load_model<float>(dir / "gender.ckpt");
  if (std::filesystem::exists(dir / "trunk_shared.ckpt")) {
    b.shared = load_encoder(dir, "shared");
  } else {
    b.male = load_encoder(dir, "male");
    b.female = load_encoder(dir, "female");
  }
  for (const auto* m : {&b.vad, &b.gender}) {
    if (m->output_shape() != nnet::Shape{2}) {
      throw ModelError("checkpoint '" + m->tag() + "' is not a 2-class model");
    }
  }
  return b;
}

nnet::Tensor<float> window_input(const FrameWindow& window, const FeatureNorm& norm) {
  const auto rows = static_cast<int>(window.mel_patch.rows());
  const auto cols = static_cast<int>(window.mel_patch.cols());
  nnet::Tensor<float> t({1, rows, cols});
  // Row-major [mel, time] layout.
  Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      t.data().data(), rows, cols) =
      ((window.mel_patch.array() + norm.offset) / norm.scale).cast<float>().matrix();
  return t;
}

FrameWindow make_window(std::span<const double> samples, double start_time_s,
                        const LogMelAnalyzer& analyzer) {
  FrameWindow w;
  w.mel_patch = analyzer.compute(samples, start_time_s).values;
  w.start_time_s = start_time_s;
  w.rms_dbfs = rms_dbfs(samples);
  return w;
}

GateDecision energy_gate(const FrameWindow& window, double threshold_dbfs) {
  return window.rms_dbfs < threshold_dbfs ? GateDecision::kRejected : GateDecision::kCandidate;
}

namespace {

ClassDecision run_classifier(const nnet::Tensor<float>& input, const nnet::Model<float>& model) {
  if (model.output_shape() != nnet::Shape{2} || !model.ends_with_softmax()) {
    throw ModelError("model '" + model.tag() + "' is not a 2-class softmax classifier");
  }
  const auto logits = nnet::forward_logits(model, input).output();
  ClassDecision d;
  d.probs = nnet::softmax<double>(logits.data().cast<double>());
  Eigen::Index arg = 0;
  d.p = d.probs.maxCoeff(&arg);
  d.label = static_cast<int>(arg);
  return d;
}

}  // namespace

ClassDecision classify_vad(const FrameWindow& window, const nnet::Model<float>& model,
                           const FeatureNorm& norm) {
  return run_classifier(window_input(window, norm), model);
}

ClassDecision classify_gender(const FrameAnnotation& annotation, const nnet::Model<float>& model,
                              const FeatureNorm& norm) {
  if (!annotation.is_speech()) {
    throw PreconditionError("classify_gender: window at " +
                            std::to_string(annotation.window.start_time_s) + " s is not speech");
  }
  return run_classifier(window_input(annotation.window, norm), model);
}

nnet::Tensor<float> trunk_features(const FrameWindow& window, const nnet::Model<float>& trunk,
                                   const FeatureNorm& norm) {
  return nnet::infer(trunk, window_input(window, norm));
}

Eigen::VectorXd embed_frame(const FrameAnnotation& annotation, const Encoder& encoder,
                            const FeatureNorm& norm) {
  if (!annotation.is_speech()) {
    throw PreconditionError("embed_frame: window is not speech");
  }
  const auto pooled = trunk_features(annotation.window, encoder.trunk, norm);
  // Re-normalize in double so the unit-norm contract holds at double precision.
  const Eigen::VectorXd e = nnet::infer(encoder.projection, pooled).data().cast<double>();
  return e.normalized();
}

FrameAnnotation annotate_window(FrameWindow window, const CascadeBundle& bundle,
                                const PipelineConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  FrameAnnotation a;
  a.window = std::move(window);
  if (energy_gate(a.window, cfg.gate_dbfs) == GateDecision::kRejected) {
    a.gated = true;
    a.vad = VadLabel::kNoise;
    a.vad_p = 1.0;
  } else {
    const ClassDecision vad = classify_vad(a.window, bundle.vad, cfg.norm);
    a.vad = vad.label == 1 ? VadLabel::kSpeech : VadLabel::kNoise;
    a.vad_p = vad.p;
    if (a.is_speech()) {
      const ClassDecision g = classify_gender(a, bundle.gender, cfg.norm);
      a.gender = g.label == 0 ? Gender::kMale : Gender::kFemale;
      a.gender_p = g.p;
      const Encoder& enc = bundle.encoder_for(*a.gender);
      const auto pooled = trunk_features(a.window, enc.trunk, cfg.norm);
      const Eigen::VectorXd e = nnet::infer(enc.projection, pooled).data().cast<double>();
      a.embedding = e.normalized();
      if (enc.emotion_head) a.emotion = emotion_from_features(pooled, *enc.emotion_head);
    }
  }
  a.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return a;
}

int window_count(std::int64_t n_samples, const PipelineConfig& cfg) {
  if (n_samples < cfg.window_samples()) return 0;
  return static_cast<int>((n_samples - cfg.window_samples()) / cfg.hop_samples()) + 1;
}

StreamProcessor::StreamProcessor(const CascadeBundle& bundle, PipelineConfig cfg)
    : bundle_(bundle), cfg_(std::move(cfg)), analyzer_(cfg_.frame, cfg_.sample_rate_hz) {
  cfg_.validate();
}

std::vector<FrameAnnotation> StreamProcessor::push(std::span<const double> samples) {
  buffer_.insert(buffer_.end(), samples.begin(), samples.end());
  std::vector<FrameAnnotation> out;
  const std::int64_t win = cfg_.window_samples();
  const std::int64_t hop = cfg_.hop_samples();
  for (;;) {
    const std::int64_t start = static_cast<std::int64_t>(emitted_) * hop;
    const std::int64_t offset = start - consumed_;
    if (offset + win > static_cast<std::int64_t>(buffer_.size())) break;
    const std::span<const double> view(buffer_.data() + offset, static_cast<std::size_t>(win));
    const auto t0 = std::chrono::steady_clock::now();
    FrameWindow w = make_window(view, static_cast<double>(start) / cfg_.sample_rate_hz, analyzer_);
    out.push_back(annotate_window(std::move(w), bundle_, cfg_));
    // Per-window latency covers feature extraction as well as the cascade.
    out.back().latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    ++emitted_;
    const std::int64_t next_offset = static_cast<std::int64_t>(emitted_) * hop - consumed_;
    const std::int64_t drop = std::min<std::int64_t>(next_offset, static_cast<std::int64_t>(buffer_.size()));
    buffer_.erase(buffer_.begin(), buffer_.begin() + drop);
    consumed_ += drop;
  }
  return out;
}

std::vector<FrameAnnotation> process_stream(const AudioBuffer& audio, const CascadeBundle& bundle,
                                            const PipelineConfig& cfg) {
  audio.validate();
  if (audio.sample_rate_hz != cfg.sample_rate_hz) {
    throw InvalidArgument("audio sample rate " + std::to_string(audio.sample_rate_hz) +
                          " does not match pipeline rate " + std::to_string(cfg.sample_rate_hz));
  }
  if (window_count(audio.samples.size(), cfg) == 0) {
    throw EmptyInputError("audio shorter than one " + std::to_string(cfg.window_s) + " s window");
  }
  StreamProcessor stream(bundle, cfg);
  return stream.push(std::span<const double>(audio.samples.data(), audio.samples.size()));
}

}  // namespace voxdesk
