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

#include "voxdesk/emotion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxdesk/nnet/losses.hpp"
#include "voxdesk/pipeline.hpp"

namespace voxdesk {

Emotion EmotionDistribution::argmax() const {
  return static_cast<Emotion>(std::max_element(p.begin(), p.end()) - p.begin());
}

void EmotionDistribution::validate(double tolerance) const {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("emotion probability outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw InvalidArgument("emotion probabilities sum to " + std::to_string(sum));
  }
}

nnet::Model<float> make_emotion_head(int n_features, std::uint64_t seed) {
  nnet::Model<float> head({n_features}, seed, "emotion");
  head.dense("emotion", kNumEmotions).softmax();
  return head;
}

EmotionDistribution emotion_from_features(const nnet::Tensor<float>& pooled,
                                          const nnet::Model<float>& head) {
  if (head.output_shape() != nnet::Shape{kNumEmotions}) {
    throw ModelError("emotion head must produce " + std::to_string(kNumEmotions) + " classes");
  }
  // Softmax in double so the distribution sums to one at double precision.
  const auto logits = nnet::forward_logits(head, pooled).output();
  const Eigen::VectorXd p = nnet::softmax<double>(logits.data().cast<double>());
  EmotionDistribution out;
  std::copy(p.data(), p.data() + kNumEmotions, out.p.begin());
  return out;
}

EmotionDistribution classify_emotion(const FrameAnnotation& annotation,
                                     const nnet::Model<float>& trunk,
                                     const nnet::Model<float>& head) {
  if (!annotation.is_speech()) {
    throw PreconditionError("classify_emotion: window at " +
                            std::to_string(annotation.window.start_time_s) + " s is not speech");
  }
  return emotion_from_features(trunk_features(annotation.window, trunk), head);
}

}  // namespace voxdesk
