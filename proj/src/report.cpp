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

#include "voxdesk/report.hpp"

#include <json.hpp>

#include "voxdesk/errors.hpp"

namespace voxdesk {
namespace {

using nlohmann::json;

json gender_json(const std::optional<Gender>& g) {
  return g ? json(std::string(to_string(*g))) : json(nullptr);
}

std::optional<Gender> gender_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  const auto g = parse_gender(j.get<std::string>());
  if (!g) throw FormatError("report gender: unknown value '" + j.get<std::string>() + "'");
  return g;
}

json emotion_json(const std::optional<EmotionDistribution>& d) {
  if (!d) return nullptr;
  json out = json::object();
  for (int i = 0; i < kNumEmotions; ++i) out[std::string(kEmotionNames[i])] = d->p[i];
  return out;
}

std::optional<EmotionDistribution> emotion_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  EmotionDistribution d;
  for (int i = 0; i < kNumEmotions; ++i) d.p[i] = j.at(std::string(kEmotionNames[i])).get<double>();
  return d;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string serialize_report(const AnalysisReport& r) {
  json j;
  j["schema"] = kReportSchema;
  j["audio"] = {{"path", r.audio.path},
                {"duration_s", r.audio.duration_s},
                {"sample_rate", r.audio.sample_rate}};
  j["conversation"] = {{"total_duration_s", r.total_duration_s}, {"silence_s", r.silence_s}};
  j["segments"] = json::array();
  for (const auto& s : r.segments) {
    j["segments"].push_back({{"speaker_id", s.speaker_id},
                             {"start_s", s.start_s},
                             {"end_s", s.end_s},
                             {"confidence", s.confidence},
                             {"gender", gender_json(s.gender)},
                             {"emotion", emotion_json(s.emotion)}});
  }
  j["speakers"] = json::array();
  for (const auto& s : r.speakers) {
    const auto& m = s.metrics;
    j["speakers"].push_back({{"id", m.speaker_id},
                             {"gender", gender_json(s.gender)},
                             {"total_speech_s", m.total_speech_s},
                             {"talk_ratio", m.talk_ratio},
                             {"n_utterances", m.n_utterances},
                             {"mean_utterance_s", m.mean_utterance_s},
                             {"max_utterance_s", m.max_utterance_s},
                             {"n_30s_violations", m.n_30s_violations},
                             {"tempo_syl_per_s", m.tempo_syl_per_s},
                             {"positivity_proxy", optional_number(s.positivity_proxy)},
                             {"confidence_proxy", optional_number(s.confidence_proxy)}});
  }
  j["pipeline"] = {{"model_versions", r.pipeline.model_versions},
                   {"real_time_factor", r.pipeline.real_time_factor},
                   {"median_latency_ms", r.pipeline.median_latency_ms},
                   {"n_windows", r.pipeline.n_windows},
                   {"n_speech_windows", r.pipeline.n_speech_windows}};
  return j.dump(2) + "\n";
}

AnalysisReport parse_report(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != kReportSchema) {
      throw FormatError("report schema: expected " + std::string(kReportSchema) + ", got " +
                        j.at("schema").get<std::string>());
    }
    AnalysisReport r;
    const auto& a = j.at("audio");
    r.audio = {a.at("path").get<std::string>(), a.at("duration_s").get<double>(),
               a.at("sample_rate").get<int>()};
    const auto& c = j.at("conversation");
    r.total_duration_s = c.at("total_duration_s").get<double>();
    r.silence_s = c.at("silence_s").get<double>();
    for (const auto& s : j.at("segments")) {
      r.segments.push_back({s.at("speaker_id").get<int>(), s.at("start_s").get<double>(),
                            s.at("end_s").get<double>(), s.at("confidence").get<double>(),
                            gender_from(s.at("gender")), emotion_from(s.at("emotion"))});
    }
    for (const auto& s : j.at("speakers")) {
      SpeakerRecord rec;
      auto& m = rec.metrics;
      m.speaker_id = s.at("id").get<int>();
      m.total_speech_s = s.at("total_speech_s").get<double>();
      m.talk_ratio = s.at("talk_ratio").get<double>();
      m.n_utterances = s.at("n_utterances").get<int>();
      m.mean_utterance_s = s.at("mean_utterance_s").get<double>();
      m.max_utterance_s = s.at("max_utterance_s").get<double>();
      m.n_30s_violations = s.at("n_30s_violations").get<int>();
      m.tempo_syl_per_s = s.at("tempo_syl_per_s").get<double>();
      rec.gender = gender_from(s.at("gender"));
      rec.positivity_proxy = number_from(s.at("positivity_proxy"));
      rec.confidence_proxy = number_from(s.at("confidence_proxy"));
      r.speakers.push_back(rec);
    }
    const auto& p = j.at("pipeline");
    r.pipeline.model_versions = p.at("model_versions").get<std::map<std::string, std::string>>();
    r.pipeline.real_time_factor = p.at("real_time_factor").get<double>();
    r.pipeline.median_latency_ms = p.at("median_latency_ms").get<double>();
    r.pipeline.n_windows = p.at("n_windows").get<int>();
    r.pipeline.n_speech_windows = p.at("n_speech_windows").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report json: ") + e.what());
  }
}

}  // namespace voxdesk
