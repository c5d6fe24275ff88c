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

#include <filesystem>
#include <vector>

#include "voxdesk/dsp.hpp"

namespace voxdesk {

/// Reads RIFF/WAVE, 16-bit signed PCM, mono. Unknown chunks are skipped.
/// Throws FormatError naming the offending field.
AudioBuffer read_wav(const std::filesystem::path& path, int required_rate_hz = 16000);
AudioBuffer decode_wav(const std::vector<char>& bytes, int required_rate_hz = 16000);

/// Writes 16-bit mono PCM; samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);
std::vector<char> encode_wav(const AudioBuffer& audio);

}  // namespace voxdesk
