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
#include <optional>
#include <string>
#include <string_view>

namespace voxdesk {

enum class Gender : std::uint8_t { kMale = 0, kFemale = 1 };

// Fixed order; index i is logit i of every emotion head.
enum class Emotion : std::uint8_t {
  kHappiness = 0,
  kSadness,
  kAnger,
  kFear,
  kDisgust,
  kSurprise,
  kBoredom,
  kNeutrality,
};

inline constexpr int kNumEmotions = 8;

inline constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "Happiness", "Sadness", "Anger", "Fear", "Disgust", "Surprise", "Boredom", "Neutrality"};

inline std::string_view to_string(Emotion e) { return kEmotionNames[static_cast<int>(e)]; }
inline std::string_view to_string(Gender g) { return g == Gender::kMale ? "male" : "female"; }

inline std::optional<Emotion> parse_emotion(std::string_view s) {
  for (int i = 0; i < kNumEmotions; ++i) {
    if (kEmotionNames[i] == s) return static_cast<Emotion>(i);
  }
  return std::nullopt;
}

inline std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "male") return Gender::kMale;
  if (s == "female") return Gender::kFemale;
  return std::nullopt;
}

/// SplitMix64 finalizer; derives independent child seeds from a root seed.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace voxdesk
