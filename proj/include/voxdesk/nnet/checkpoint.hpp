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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "voxdesk/errors.hpp"
#include "voxdesk/nnet/model.hpp"

namespace voxdesk::nnet {

// Layout (all integers little-endian):
//   "ASYA1" | u32 version | str tag | u64 seed | u32 rank, i32 dims...
//   u32 n_layers, per layer: u8 kind, str name, 6 x i32, u8 pool
//   u32 n_params, per param: str name, u8 trainable, u32 rank, u32 dims..., f32 data...
// where str is u32 length followed by bytes.
inline constexpr std::string_view kCheckpointMagic = "ASYA1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <typename T>
  void le(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(raw, raw + sizeof(T));
    }
    bytes(raw, sizeof(T));
  }
  void str(const std::string& s) {
    le<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  const std::vector<char>& buffer() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<char> data) : data_(std::move(data)) {}

  void bytes(void* p, std::size_t n) {
    if (pos_ + n > data_.size()) throw FormatError("checkpoint truncated at byte " + std::to_string(pos_));
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T le() {
    unsigned char raw[sizeof(T)];
    bytes(raw, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(raw, raw + sizeof(T));
    }
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
  }
  std::string str() {
    const auto n = le<std::uint32_t>();
    if (n > data_.size() - pos_) throw FormatError("checkpoint string length out of range");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

template <typename Scalar>
std::vector<char> serialize_model(const Model<Scalar>& model) {
  detail::ByteWriter w;
  w.bytes(kCheckpointMagic.data(), kCheckpointMagic.size());
  w.le<std::uint32_t>(kCheckpointVersion);
  w.str(model.tag());
  w.le<std::uint64_t>(model.rng_seed());
  w.le<std::uint32_t>(static_cast<std::uint32_t>(model.input_shape().size()));
  for (int d : model.input_shape()) w.le<std::int32_t>(d);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(model.layers().size()));
  for (const Layer& l : model.layers()) {
    w.le<std::uint8_t>(static_cast<std::uint8_t>(l.kind));
    w.str(l.name);
    for (int v : {l.in_channels, l.out_channels, l.kernel_h, l.kernel_w, l.stride_h, l.stride_w}) {
      w.le<std::int32_t>(v);
    }
    w.le<std::uint8_t>(static_cast<std::uint8_t>(l.pool));
  }
  w.le<std::uint32_t>(static_cast<std::uint32_t>(model.params().size()));
  for (const auto& [name, t] : model.params()) {
    w.str(name);
    w.le<std::uint8_t>(model.is_trainable(name) ? 1 : 0);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(t.shape().size()));
    for (int d : t.shape()) w.le<std::uint32_t>(static_cast<std::uint32_t>(d));
    for (Eigen::Index i = 0; i < t.size(); ++i) w.le<float>(static_cast<float>(t[i]));
  }
  return w.buffer();
}

template <typename Scalar>
Model<Scalar> deserialize_model(std::vector<char> bytes) {
  detail::ByteReader r(std::move(bytes));
  char magic[5];
  try {
    r.bytes(magic, sizeof(magic));
  } catch (const FormatError&) {
    throw FormatError("not a checkpoint: file too short for magic");
  }
  if (std::string_view(magic, sizeof(magic)) != kCheckpointMagic) {
    throw FormatError("not a checkpoint: bad magic");
  }
  const auto version = r.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                       std::to_string(kCheckpointVersion) + ")");
  }
  std::string tag = r.str();
  const auto seed = r.le<std::uint64_t>();
  Shape input(r.le<std::uint32_t>());
  if (input.size() > 8) throw FormatError("checkpoint input rank out of range");
  for (int& d : input) d = r.le<std::int32_t>();

  const auto n_layers = r.le<std::uint32_t>();
  std::vector<Layer> layers(n_layers);
  for (Layer& l : layers) {
    const auto kind = r.le<std::uint8_t>();
    if (kind < 1 || kind > 6) throw FormatError("checkpoint has unknown layer kind " + std::to_string(kind));
    l.kind = static_cast<LayerKind>(kind);
    l.name = r.str();
    l.in_channels = r.le<std::int32_t>();
    l.out_channels = r.le<std::int32_t>();
    l.kernel_h = r.le<std::int32_t>();
    l.kernel_w = r.le<std::int32_t>();
    l.stride_h = r.le<std::int32_t>();
    l.stride_w = r.le<std::int32_t>();
    const auto pool = r.le<std::uint8_t>();
    if (pool > 1) throw FormatError("checkpoint has unknown pooling mode");
    l.pool = static_cast<PoolAxes>(pool);
  }

  const auto n_params = r.le<std::uint32_t>();
  typename Model<Scalar>::Params params;
  std::set<std::string> frozen;
  for (std::uint32_t i = 0; i < n_params; ++i) {
    std::string name = r.str();
    const bool trainable = r.le<std::uint8_t>() != 0;
    Shape shape(r.le<std::uint32_t>());
    if (shape.size() > 8) throw FormatError("checkpoint tensor rank out of range");
    for (int& d : shape) d = static_cast<int>(r.le<std::uint32_t>());
    Tensor<Scalar> t(shape);
    for (Eigen::Index k = 0; k < t.size(); ++k) t[k] = static_cast<Scalar>(r.le<float>());
    if (!trainable) frozen.insert(name);
    if (!params.emplace(name, std::move(t)).second) {
      throw FormatError("checkpoint repeats parameter '" + name + "'");
    }
  }
  if (!r.at_end()) throw FormatError("checkpoint has trailing bytes");
  return Model<Scalar>::from_parts(std::move(input), std::move(layers), std::move(params),
                                   std::move(frozen), seed, std::move(tag));
}

template <typename Scalar>
void save_model(const Model<Scalar>& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

template <typename Scalar>
Model<Scalar> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_model<Scalar>(std::move(bytes));
  } catch (const VersionError& e) {
    throw VersionError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace voxdesk::nnet
