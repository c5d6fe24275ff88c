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

#include <string>

#include "voxdesk/errors.hpp"
#include "voxdesk/nnet/model.hpp"

namespace voxdesk::nnet {

/// p <- p - lr * g. Parameters without a gradient entry are untouched.
template <typename Scalar>
void sgd_step(typename Model<Scalar>::Params& params, const Gradients<Scalar>& grads, Scalar lr) {
  if (!(lr > Scalar(0))) throw InvalidArgument("sgd_step: learning rate must be positive");
  for (const auto& [name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end()) {
      throw InvalidArgument("sgd_step: gradient for unknown parameter '" + name + "'");
    }
    if (g.shape() != it->second.shape()) {
      throw ShapeError("sgd_step: gradient '" + name + "' has shape " + to_string(g.shape()) +
                       ", parameter has " + to_string(it->second.shape()));
    }
    if (!g.all_finite()) {
      throw DivergenceError("training diverged: non-finite gradient for '" + name +
                            "' (max |g| = " + std::to_string(g.data().cwiseAbs().maxCoeff()) + ")");
    }
  }
  for (const auto& [name, g] : grads) {
    params.at(name).data() -= lr * g.data();
  }
}

template <typename Scalar>
void sgd_step(Model<Scalar>& model, const Gradients<Scalar>& grads, Scalar lr) {
  sgd_step<Scalar>(model.params(), grads, lr);
}

}  // namespace voxdesk::nnet
