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

#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "voxdesk/errors.hpp"

namespace voxdesk::nnet {

using Shape = std::vector<int>;

inline std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

inline Eigen::Index element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Eigen::Index{1},
                         std::multiplies<>());
}

/// Dense row-major tensor backed by an Eigen column vector.
template <typename Scalar>
class Tensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    check_shape();
    data_ = Vector::Zero(element_count(shape_));
  }

  Tensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape();
    if (data_.size() != element_count(shape_)) {
      throw ShapeError("tensor data size " + std::to_string(data_.size()) +
                       " does not match shape " + nnet::to_string(shape_));
    }
  }

  static Tensor vector(const Vector& v) {
    return Tensor({static_cast<int>(v.size())}, v);
  }

  const Shape& shape() const { return shape_; }
  Eigen::Index size() const { return data_.size(); }
  bool empty() const { return shape_.empty(); }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  Scalar& operator[](Eigen::Index i) { return data_[i]; }
  Scalar operator[](Eigen::Index i) const { return data_[i]; }

  bool all_finite() const { return data_.allFinite(); }

  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>(shape_, data_.template cast<Other>());
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_.size() == b.data_.size() &&
           (a.data_.array() == b.data_.array()).all();
  }

 private:
  void check_shape() const {
    for (int d : shape_) {
      if (d <= 0) {
        throw ShapeError("tensor dimensions must be positive: " +
                         nnet::to_string(shape_));
      }
    }
  }

  Shape shape_;
  Vector data_;
};

}  // namespace voxdesk::nnet
