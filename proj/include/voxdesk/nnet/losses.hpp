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

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "voxdesk/errors.hpp"
#include "voxdesk/nnet/tensor.hpp"

namespace voxdesk::nnet {

template <typename Scalar>
using Embedding = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Aligned lists: anchors[i] and positives[i] share a speaker, negatives[i] does not.
template <typename Scalar>
struct TripletBatch {
  std::vector<Embedding<Scalar>> anchors;
  std::vector<Embedding<Scalar>> positives;
  std::vector<Embedding<Scalar>> negatives;

  std::size_t size() const { return anchors.size(); }
};

template <typename Scalar>
struct TripletLoss {
  Scalar loss = 0;
  std::vector<Embedding<Scalar>> grad_anchors;
  std::vector<Embedding<Scalar>> grad_positives;
  std::vector<Embedding<Scalar>> grad_negatives;
};

struct TripletParams {
  double margin = 0.2;
  double beta = 1.0;
};

/// mean_i exp(beta * (d(a_i, p_i) - d(a_i, n_i) + margin)) with d the cosine distance.
template <typename Scalar>
TripletLoss<Scalar> exp_triplet_loss(const TripletBatch<Scalar>& batch,
                                     const TripletParams& params = {},
                                     double norm_tolerance = 1e-6) {
  const std::size_t n = batch.size();
  if (n == 0) throw InvalidArgument("exp_triplet_loss: empty batch");
  if (batch.positives.size() != n || batch.negatives.size() != n) {
    throw InvalidArgument("exp_triplet_loss: anchors/positives/negatives differ in length");
  }
  if (!(params.margin >= 0.0) || !(params.beta > 0.0)) {
    throw InvalidArgument("exp_triplet_loss: need margin >= 0 and beta > 0");
  }
  auto check = [&](const Embedding<Scalar>& v, const char* role, std::size_t i) {
    if (v.size() != batch.anchors[0].size()) {
      throw InvalidArgument("exp_triplet_loss: embedding dimension mismatch");
    }
    const double norm = static_cast<double>(v.norm());
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > norm_tolerance) {
      throw PreconditionError(std::string("exp_triplet_loss: ") + role + " " +
                              std::to_string(i) + " is not unit norm (|v| = " +
                              std::to_string(norm) + ")");
    }
  };
  TripletLoss<Scalar> out;
  out.grad_anchors.resize(n);
  out.grad_positives.resize(n);
  out.grad_negatives.resize(n);
  const Scalar beta = static_cast<Scalar>(params.beta);
  const Scalar margin = static_cast<Scalar>(params.margin);
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);
  Scalar total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = batch.anchors[i];
    const auto& p = batch.positives[i];
    const auto& q = batch.negatives[i];
    check(a, "anchor", i);
    check(p, "positive", i);
    check(q, "negative", i);
    const Scalar d_ap = Scalar(1) - a.dot(p);
    const Scalar d_an = Scalar(1) - a.dot(q);
    const Scalar term = std::exp(beta * (d_ap - d_an + margin));
    total += term;
    // d/da (d_ap - d_an) = -p + q
    const Scalar coeff = term * beta * inv_n;
    out.grad_anchors[i] = coeff * (q - p);
    out.grad_positives[i] = -coeff * a;
    out.grad_negatives[i] = coeff * a;
  }
  out.loss = total * inv_n;
  return out;
}

template <typename Scalar>
struct ClassLoss {
  Scalar loss = 0;
  Tensor<Scalar> grad;
};

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> softmax(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& logits) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

template <typename Scalar>
ClassLoss<Scalar> softmax_cross_entropy(const Tensor<Scalar>& logits, int label) {
  if (logits.shape().size() != 1) throw ShapeError("softmax_cross_entropy: logits must be a vector");
  if (label < 0 || label >= logits.size()) {
    throw InvalidArgument("softmax_cross_entropy: label " + std::to_string(label) +
                          " outside [0, " + std::to_string(logits.size()) + ")");
  }
  if (!logits.all_finite()) throw InvalidArgument("softmax_cross_entropy: non-finite logits");
  const auto& z = logits.data();
  const Scalar mx = z.maxCoeff();
  const Scalar log_sum = std::log((z.array() - mx).exp().sum()) + mx;
  ClassLoss<Scalar> out;
  out.loss = log_sum - z[label];
  out.grad = Tensor<Scalar>(logits.shape(), softmax<Scalar>(z));
  out.grad[label] -= Scalar(1);
  return out;
}

}  // namespace voxdesk::nnet
