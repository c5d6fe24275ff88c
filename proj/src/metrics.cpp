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
#include <map>

#include "voxdesk/errors.hpp"

namespace voxdesk {
namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kMinTempoSegmentS = 0.2;

}  // namespace

ConversationReport conversation_metrics(std::vector<DiarizationSegment> segments,
                                        double total_duration_s) {
  if (!(total_duration_s >= 0.0) || !std::isfinite(total_duration_s)) {
    throw InvalidArgument("conversation_metrics: total duration must be finite and >= 0");
  }
  std::sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) {
    return a.start_s != b.start_s ? a.start_s < b.start_s : a.speaker_id < b.speaker_id;
  });
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (s.start_s < -kTimeEps || s.end_s > total_duration_s + kTimeEps || s.end_s < s.start_s) {
      throw InvalidArgument("conversation_metrics: segment [" + std::to_string(s.start_s) + ", " +
                            std::to_string(s.end_s) + ") outside the conversation");
    }
    if (i > 0 && s.start_s < segments[i - 1].end_s - kTimeEps) {
      throw InvalidArgument("conversation_metrics: segments overlap at " + std::to_string(s.start_s) + " s");
    }
  }

  std::map<int, std::vector<double>> utterances;
  std::map<int, double> last_end;
  for (const auto& s : segments) {
    auto& list = utterances[s.speaker_id];
    auto it = last_end.find(s.speaker_id);
    if (it != last_end.end() && std::abs(it->second - s.start_s) <= kTimeEps) {
      list.back() += s.duration_s();
    } else {
      list.push_back(s.duration_s());
    }
    last_end[s.speaker_id] = s.end_s;
  }

  ConversationReport r;
  r.total_duration_s = total_duration_s;
  double speech = 0.0;
  for (const auto& [id, list] : utterances) {
    SpeakerMetrics m;
    m.speaker_id = id;
    m.n_utterances = static_cast<int>(list.size());
    for (double u : list) {
      m.total_speech_s += u;
      m.max_utterance_s = std::max(m.max_utterance_s, u);
      if (u > kLongUtteranceS) ++m.n_30s_violations;
    }
    m.mean_utterance_s = m.total_speech_s / m.n_utterances;
    m.talk_ratio = total_duration_s > 0.0 ? m.total_speech_s / total_duration_s : 0.0;
    speech += m.total_speech_s;
    r.speakers.push_back(m);
  }
  r.silence_s = std::max(0.0, total_duration_s - speech);
  return r;
}

double tempo_estimate(const AudioBuffer& audio, const DiarizationSegment& segment,
                      const TempoConfig& cfg) {
  audio.validate();
  const double duration = segment.duration_s();
  if (segment.start_s < -kTimeEps || segment.end_s > audio.duration_s() + kTimeEps) {
    throw InvalidArgument("tempo_estimate: segment outside audio bounds");
  }
  if (duration < kMinTempoSegmentS) {
    throw TooShortError("tempo_estimate: segment of " + std::to_string(duration) +
                        " s is shorter than 0.2 s");
  }
  const double sr = audio.sample_rate_hz;
  const auto first = static_cast<Eigen::Index>(std::lround(segment.start_s * sr));
  const auto last = std::min<Eigen::Index>(audio.samples.size(),
                                           static_cast<Eigen::Index>(std::lround(segment.end_s * sr)));
  const auto hop = std::max<Eigen::Index>(1, std::lround(cfg.hop_s * sr));
  const auto frame = std::max<Eigen::Index>(1, std::lround(cfg.frame_s * sr));

  std::vector<double> env;
  for (Eigen::Index p = first; p < last; p += hop) {
    const Eigen::Index n = std::min(frame, last - p);
    env.push_back(std::sqrt(audio.samples.segment(p, n).squaredNorm() / static_cast<double>(n)));
  }
  // Centered moving average.
  std::vector<double> smooth(env.size(), 0.0);
  const int half = cfg.smooth_frames / 2;
  for (int i = 0; i < static_cast<int>(env.size()); ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(static_cast<int>(env.size()) - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += env[j];
    smooth[i] = acc / (hi - lo + 1);
  }
  if (smooth.size() < 3) return 0.0;

  std::vector<double> sorted = smooth;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  if (!(peak > median)) return 0.0;
  const double threshold = median + cfg.relative_threshold * (peak - median);

  std::vector<int> candidates;
  for (int i = 1; i + 1 < static_cast<int>(smooth.size()); ++i) {
    if (smooth[i] > threshold && smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1]) {
      candidates.push_back(i);
    }
  }
  // Enforce the minimum gap, keeping the stronger peak of any close pair.
  std::sort(candidates.begin(), candidates.end(),
            [&](int a, int b) { return smooth[a] != smooth[b] ? smooth[a] > smooth[b] : a < b; });
  const double gap_frames = cfg.min_peak_gap_s / (static_cast<double>(hop) / sr);
  std::vector<int> kept;
  for (int c : candidates) {
    const bool clear = std::none_of(kept.begin(), kept.end(),
                                    [&](int k) { return std::abs(k - c) < gap_frames; });
    if (clear) kept.push_back(c);
  }
  return static_cast<double>(kept.size()) / duration;
}

void attach_tempo(ConversationReport& report, const std::vector<DiarizationSegment>& segments,
                  const AudioBuffer& audio, const TempoConfig& cfg) {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& s : segments) {
    if (s.duration_s() < kMinTempoSegmentS) continue;
    auto& [sum, n] = acc[s.speaker_id];
    sum += tempo_estimate(audio, s, cfg);
    ++n;
  }
  for (auto& m : report.speakers) {
    const auto it = acc.find(m.speaker_id);
    m.tempo_syl_per_s = it == acc.end() ? 0.0 : it->second.first / it->second.second;
  }
}

AffectProxies affect_proxies(const EmotionDistribution& d) {
  return {d[Emotion::kHappiness], 1.0 - d[Emotion::kFear] - d[Emotion::kSadness]};
}

}  // namespace voxdesk
