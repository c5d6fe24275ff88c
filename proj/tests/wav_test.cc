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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "voxdesk/errors.hpp"

namespace voxdesk {
namespace {

void PutU32(std::vector<char>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<char>((v >> (8 * i)) & 0xff);
}
void PutU16(std::vector<char>& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<char>(v & 0xff);
  b[at + 1] = static_cast<char>(v >> 8);
}
std::uint32_t GetU32(const std::vector<char>& b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}

AudioBuffer Ramp(int n) {
  AudioBuffer a;
  a.sample_rate_hz = 16000;
  a.samples = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
  return a;
}

std::string ErrorOf(const std::vector<char>& bytes) {
  try {
    decode_wav(bytes);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(WavTest, HeaderLayout) {
  const auto bytes = encode_wav(Ramp(10));
  ASSERT_EQ(bytes.size(), 44u + 20u);
  EXPECT_EQ(std::string(bytes.data(), 4), "RIFF");
  EXPECT_EQ(GetU32(bytes, 4), 36u + 20u);
  EXPECT_EQ(std::string(bytes.data() + 8, 4), "WAVE");
  EXPECT_EQ(GetU32(bytes, 24), 16000u);
  EXPECT_EQ(GetU32(bytes, 28), 32000u);  // byte rate
  EXPECT_EQ(GetU32(bytes, 40), 20u);
}

TEST(WavTest, RoundTripQuantization) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AudioBuffer a;
  a.sample_rate_hz = 16000;
  a.samples.resize(1000);
  for (auto& x : a.samples) x = u(rng);
  const AudioBuffer b = decode_wav(encode_wav(a));
  ASSERT_EQ(b.samples.size(), a.samples.size());
  EXPECT_EQ(b.sample_rate_hz, 16000);
  for (Eigen::Index i = 0; i < a.samples.size(); ++i) {
    EXPECT_DOUBLE_EQ(b.samples[i], std::lround(a.samples[i] * 32767.0) / 32768.0);
  }
}

TEST(WavTest, ClipsOutOfRange) {
  AudioBuffer a;
  a.sample_rate_hz = 16000;
  a.samples = Eigen::Vector3d(2.0, -3.0, 0.0);
  const AudioBuffer b = decode_wav(encode_wav(a));
  EXPECT_DOUBLE_EQ(b.samples[0], 32767.0 / 32768.0);
  EXPECT_DOUBLE_EQ(b.samples[1], -32767.0 / 32768.0);
  EXPECT_DOUBLE_EQ(b.samples[2], 0.0);
}

TEST(WavTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "voxdesk_wav_test.wav";
  write_wav(path, Ramp(321));
  const AudioBuffer b = read_wav(path);
  EXPECT_EQ(b.samples.size(), 321);
  std::filesystem::remove(path);
}

TEST(WavTest, SkipsUnknownChunks) {
  auto bytes = encode_wav(Ramp(4));
  // Insert a "LIST" chunk of 6 bytes between fmt and data.
  std::vector<char> list = {'L', 'I', 'S', 'T', 6, 0, 0, 0, 'a', 'b', 'c', 'd', 'e', 'f'};
  bytes.insert(bytes.begin() + 36, list.begin(), list.end());
  PutU32(bytes, 4, GetU32(bytes, 4) + static_cast<std::uint32_t>(list.size()));
  EXPECT_EQ(decode_wav(bytes).samples.size(), 4);
}

TEST(WavTest, ErrorsNameTheField) {
  const auto good = encode_wav(Ramp(8));
  auto stereo = good;
  PutU16(stereo, 22, 2);
  EXPECT_NE(ErrorOf(stereo).find("channels"), std::string::npos);

  auto rate = good;
  PutU32(rate, 24, 8000);
  EXPECT_NE(ErrorOf(rate).find("sample_rate"), std::string::npos);

  auto bits = good;
  PutU16(bits, 34, 8);
  EXPECT_NE(ErrorOf(bits).find("bits_per_sample"), std::string::npos);

  auto pcm = good;
  PutU16(pcm, 20, 3);
  EXPECT_NE(ErrorOf(pcm).find("audio_format"), std::string::npos);

  auto riff = good;
  riff[0] = 'X';
  EXPECT_NE(ErrorOf(riff).find("RIFF"), std::string::npos);

  EXPECT_THROW(decode_wav(std::vector<char>(good.begin(), good.begin() + 30)), FormatError);
}

TEST(WavTest, MissingFileIsIoError) {
  EXPECT_THROW(read_wav("/nonexistent/voxdesk/none.wav"), IoError);
}

}  // namespace
}  // namespace voxdesk
