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

#include "voxdesk/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace voxdesk {
namespace {

std::uint32_t u32_at(const std::vector<char>& b, std::size_t pos) {
  const auto* p = reinterpret_cast<const unsigned char*>(b.data() + pos);
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t u16_at(const std::vector<char>& b, std::size_t pos) {
  const auto* p = reinterpret_cast<const unsigned char*>(b.data() + pos);
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::vector<char>& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xFF));
  b.push_back(static_cast<char>(v >> 8));
}

std::string field_error(const char* field, long expected, long got) {
  return std::string("wav ") + field + ": expected " + std::to_string(expected) + ", got " +
         std::to_string(got);
}

}  // namespace

AudioBuffer decode_wav(const std::vector<char>& bytes, int required_rate_hz) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0) {
    throw FormatError("wav riff: missing RIFF header");
  }
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("wav riff: form type is not WAVE");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  AudioBuffer audio;
  while (pos + 8 <= bytes.size()) {
    const std::string id(bytes.data() + pos, 4);
    const std::uint32_t size = u32_at(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw FormatError("wav chunk '" + id + "': size " + std::to_string(size) +
                        " runs past end of file");
    }
    if (id == "fmt ") {
      if (size < 16) throw FormatError("wav fmt: chunk too small");
      const auto format = u16_at(bytes, body);
      const auto channels = u16_at(bytes, body + 2);
      const auto rate = u32_at(bytes, body + 4);
      const auto bits = u16_at(bytes, body + 14);
      if (format != 1) throw FormatError(field_error("audio_format (PCM)", 1, format));
      if (channels != 1) throw FormatError(field_error("channels", 1, channels));
      if (bits != 16) throw FormatError(field_error("bits_per_sample", 16, bits));
      if (required_rate_hz > 0 && static_cast<int>(rate) != required_rate_hz) {
        throw FormatError(field_error("sample_rate", required_rate_hz, rate));
      }
      if (rate == 0) throw FormatError("wav sample_rate: must be positive");
      audio.sample_rate_hz = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("wav data: chunk precedes fmt chunk");
      const std::size_t n = size / 2;
      audio.samples.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const auto raw = static_cast<std::int16_t>(u16_at(bytes, body + 2 * i));
        audio.samples[static_cast<Eigen::Index>(i)] = raw / 32768.0;
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  throw FormatError(have_fmt ? "wav data: missing data chunk" : "wav fmt: missing fmt chunk");
}

AudioBuffer read_wav(const std::filesystem::path& path, int required_rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes, required_rate_hz);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<char> encode_wav(const AudioBuffer& audio) {
  const auto n = static_cast<std::uint32_t>(audio.samples.size());
  std::vector<char> b;
  b.reserve(44 + 2 * n);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  put_u32(b, 36 + 2 * n);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, 1);
  put_u32(b, static_cast<std::uint32_t>(audio.sample_rate_hz));
  put_u32(b, static_cast<std::uint32_t>(audio.sample_rate_hz) * 2);
  put_u16(b, 2);
  put_u16(b, 16);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  put_u32(b, 2 * n);
  for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
    const double clipped = std::clamp(audio.samples[i], -1.0, 1.0);
    const long v = std::lround(clipped * 32767.0);
    put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return b;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  const auto bytes = encode_wav(audio);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace voxdesk
