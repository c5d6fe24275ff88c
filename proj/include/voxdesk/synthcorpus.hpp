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
#include <string>
#include <vector>

#include "voxdesk/dsp.hpp"
#include "voxdesk/labels.hpp"

namespace voxdesk::synth {

inline constexpr double kMaleF0Min = 85.0, kMaleF0Max = 155.0;
inline constexpr double kFemaleF0Min = 165.0, kFemaleF0Max = 255.0;

struct SynthSpeaker {
  int speaker_id = 0;
  Gender gender = Gender::kMale;
  double f0_hz = 120.0;
  std::array<double, 3> formants_hz{};
  std::array<double, 3> bandwidths_hz{};
  double tilt_db_per_octave = -9.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SynthSpeaker&, const SynthSpeaker&) = default;
};

enum class Contour : std::uint8_t { kFlat, kRising, kFalling, kRiseFall, kFallRise, kVibrato };

/// One row of the prosody table used to render the emotion-proxy classes.
/// These are synthetic archetypes for exercising the classifier, not models of affect.
struct ProsodyArchetype {
  Emotion label;
  Contour contour;
  double f0_excursion;    // fractional half-range of the contour
  double syllable_rate_hz;
  double peak_gain;       // output peak amplitude
  double tilt_offset_db;  // added to the speaker's dB/octave tilt
  double breathiness;     // aspiration noise relative to the voiced source
};

const std::array<ProsodyArchetype, kNumEmotions>& prosody_table();
/// Rendering parameters used when no emotion proxy is requested.
const ProsodyArchetype& default_prosody();

SynthSpeaker make_speaker(std::uint64_t seed, Gender gender, int speaker_id = 0);

AudioBuffer render_utterance(const SynthSpeaker& speaker, double duration_s,
                             std::optional<Emotion> emotion_proxy, std::uint64_t seed,
                             int sample_rate_hz = 16000);

enum class NoiseKind : std::uint8_t { kWhite, kPink, kBabble };
std::string_view to_string(NoiseKind kind);

AudioBuffer render_noise(NoiseKind kind, double duration_s, std::uint64_t seed,
                         int sample_rate_hz = 16000);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  std::optional<int> speaker_id;
  std::optional<Gender> gender;
  bool is_speech = true;
  std::optional<Emotion> emotion;
  double duration_s = 0.0;
  bool is_test = false;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

inline constexpr std::string_view kManifestHeader = "path,speaker_id,gender,vad,emotion,duration_s,split";
inline constexpr std::string_view kManifestFile = "manifest.csv";

std::string speaker_name(int speaker_id);

std::string format_manifest(const CorpusManifest& manifest);
CorpusManifest parse_manifest(const std::string& text);
void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::filesystem::path& path);

struct CorpusConfig {
  int n_speakers = 8;
  int n_utts_per_speaker = 20;
  double duration_s = 2.0;
  double noise_fraction = 0.2;
  std::uint64_t root_seed = 1234;
  double test_fraction = 0.2;
};

std::vector<SynthSpeaker> corpus_speakers(const CorpusConfig& cfg);

/// Writes WAV files plus manifest.csv into out_dir (created if missing).
CorpusManifest generate_corpus(const CorpusConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace voxdesk::synth
