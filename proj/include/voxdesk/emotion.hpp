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

#include <Eigen/Dense>

#include "voxdesk/labels.hpp"
#include "voxdesk/nnet/model.hpp"

namespace voxdesk {

struct FrameAnnotation;

/// Probabilities over the eight classes in kEmotionNames order.
struct EmotionDistribution {
  std::array<double, kNumEmotions> p{};

  Emotion argmax() const;
  double operator[](Emotion e) const { return p[static_cast<int>(e)]; }
  void validate(double tolerance = 1e-9) const;

  friend bool operator==(const EmotionDistribution&, const EmotionDistribution&) = default;
};

/// Dense + softmax head over the trunk's pooled features.
nnet::Model<float> make_emotion_head(int n_features, std::uint64_t seed);

EmotionDistribution emotion_from_features(const nnet::Tensor<float>& pooled,
                                          const nnet::Model<float>& head);

/// Runs the shared trunk then the head. The annotation must be labeled speech.
EmotionDistribution classify_emotion(const FrameAnnotation& annotation,
                                     const nnet::Model<float>& trunk,
                                     const nnet::Model<float>& head);

}  // namespace voxdesk
