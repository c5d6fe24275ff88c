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

#include "voxdesk/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "voxdesk/nnet/checkpoint.hpp"

namespace voxdesk {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string model_version(const nnet::Model<float>& m) {
  return std::string(nnet::kCheckpointMagic) + "/" + std::to_string(nnet::kCheckpointVersion) + " " +
         m.tag() + " seed=" + std::to_string(m.rng_seed());
}

}  // namespace

AnalysisResult analyze_audio(const AudioBuffer& audio, const CascadeBundle& bundle,
                             const PipelineConfig& cfg, const AnalyzeOptions& opts) {
  const auto t_start = Clock::now();
  AnalysisResult r;
  r.annotations = process_stream(audio, bundle, cfg);

  std::map<Gender, SpeakerRegistry> registries;
  std::map<std::pair<Gender, int>, int> global_ids;
  for (auto& a : r.annotations) {
    const auto t0 = Clock::now();
    LabeledWindow w;
    w.start_s = a.window.start_time_s;
    if (a.is_speech() && a.embedding) {
      const Gender route = bundle.per_gender() ? *a.gender : Gender::kMale;
      auto [it, inserted] = registries.try_emplace(route, opts.tau, opts.d_new);
      SpeakerRegistry& reg = it->second;
      const Assignment as = reg.assign(*a.embedding);
      const int local = reg.enroll_or_update(*a.embedding, as.speaker_id, a.gender);
      auto [gid, fresh] = global_ids.try_emplace({route, local}, static_cast<int>(global_ids.size()));
      w.speaker_id = gid->second;
      w.confidence = as.is_new() ? 1.0 : as.probability_of(local);
      if (fresh && a.gender) r.speaker_gender[gid->second] = *a.gender;
      r.embeddings.push_back(*a.embedding);
      r.embedding_speakers.push_back(gid->second);
    }
    r.windows.push_back(w);
    a.latency_ms += ms_since(t0);
  }
  const double hop_s = static_cast<double>(cfg.hop_samples()) / cfg.sample_rate_hz;
  r.segments = build_segments(r.windows, hop_s);
  r.conversation = conversation_metrics(r.segments, audio.duration_s());
  attach_tempo(r.conversation, r.segments, audio, opts.tempo);

  std::vector<double> lat;
  for (const auto& a : r.annotations) lat.push_back(a.latency_ms);
  std::sort(lat.begin(), lat.end());
  const std::size_t n = lat.size();
  r.median_latency_ms = n % 2 ? lat[n / 2] : 0.5 * (lat[n / 2 - 1] + lat[n / 2]);
  r.real_time_factor = ms_since(t_start) / 1000.0 / audio.duration_s();
  return r;
}

AnalysisReport make_report(const AnalysisResult& result, const AudioBuffer& audio,
                           const std::string& path, const CascadeBundle& bundle) {
  AnalysisReport rep;
  rep.audio = {path, audio.duration_s(), audio.sample_rate_hz};
  rep.total_duration_s = result.conversation.total_duration_s;
  rep.silence_s = result.conversation.silence_s;

  std::map<int, std::pair<EmotionDistribution, int>> speaker_emotion;
  for (const auto& seg : result.segments) {
    SegmentRecord rec{seg.speaker_id, seg.start_s, seg.end_s, seg.mean_confidence, std::nullopt, std::nullopt};
    const auto g = result.speaker_gender.find(seg.speaker_id);
    if (g != result.speaker_gender.end()) rec.gender = g->second;
    EmotionDistribution sum;
    int count = 0;
    for (std::size_t i = 0; i < result.windows.size(); ++i) {
      const auto& w = result.windows[i];
      if (w.speaker_id != seg.speaker_id || w.start_s < seg.start_s || w.start_s >= seg.end_s) continue;
      if (const auto& e = result.annotations[i].emotion) {
        for (int k = 0; k < kNumEmotions; ++k) sum.p[k] += e->p[k];
        ++count;
      }
    }
    if (count > 0) {
      auto& [acc, total] = speaker_emotion[seg.speaker_id];
      for (int k = 0; k < kNumEmotions; ++k) acc.p[k] += sum.p[k];
      total += count;
      for (double& p : sum.p) p /= count;
      rec.emotion = sum;
    }
    rep.segments.push_back(rec);
  }
  for (const auto& m : result.conversation.speakers) {
    SpeakerRecord rec;
    rec.metrics = m;
    const auto g = result.speaker_gender.find(m.speaker_id);
    if (g != result.speaker_gender.end()) rec.gender = g->second;
    const auto e = speaker_emotion.find(m.speaker_id);
    if (e != speaker_emotion.end()) {
      EmotionDistribution mean = e->second.first;
      for (double& p : mean.p) p /= e->second.second;
      const auto proxies = affect_proxies(mean);
      rec.positivity_proxy = proxies.positivity;
      rec.confidence_proxy = proxies.confidence;
    }
    rep.speakers.push_back(rec);
  }

  auto& versions = rep.pipeline.model_versions;
  versions["vad"] = model_version(bundle.vad);
  versions["gender"] = model_version(bundle.gender);
  auto add_encoder = [&](const Encoder& enc, const std::string& route) {
    versions["trunk_" + route] = model_version(enc.trunk);
    versions["projection_" + route] = model_version(enc.projection);
    if (enc.emotion_head) versions["emotion_" + route] = model_version(*enc.emotion_head);
  };
  if (bundle.shared) add_encoder(*bundle.shared, "shared");
  if (bundle.male) add_encoder(*bundle.male, "male");
  if (bundle.female) add_encoder(*bundle.female, "female");
  rep.pipeline.real_time_factor = result.real_time_factor;
  rep.pipeline.median_latency_ms = result.median_latency_ms;
  rep.pipeline.n_windows = static_cast<int>(result.annotations.size());
  rep.pipeline.n_speech_windows = static_cast<int>(result.embeddings.size());
  return rep;
}

std::string histogram_csv(const DistanceHistograms& h) {
  std::ostringstream os;
  os << "kind,bin_lo,bin_hi,count\n";
  const double width = h.intra.empty() ? 0.0 : 2.0 / static_cast<double>(h.intra.size());
  auto rows = [&](const char* kind, const std::vector<std::size_t>& bins) {
    for (std::size_t b = 0; b < bins.size(); ++b) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%zu\n", kind, b * width, (b + 1) * width, bins[b]);
      os << buf;
    }
  };
  rows("intra", h.intra);
  rows("inter", h.inter);
  return os.str();
}

std::string projection_csv(const std::vector<Eigen::Vector3d>& points, const std::vector<int>& speakers) {
  if (points.size() != speakers.size()) throw InvalidArgument("projection_csv: size mismatch");
  std::ostringstream os;
  os << "speaker_id,x,y,z\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", speakers[i], points[i].x(), points[i].y(),
                  points[i].z());
    os << buf;
  }
  return os.str();
}

}  // namespace voxdesk
