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

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "voxdesk/errors.hpp"

namespace voxdesk {

/// Mono PCM audio, samples normalized to [-1, 1].
struct AudioBuffer {
  Eigen::VectorXd samples;
  int sample_rate_hz = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  void validate() const;
};

/// Short-time analysis parameters. Defaults are 25 ms / 10 ms at 16 kHz.
struct FrameConfig {
  int window_len_samples = 400;
  int hop_len_samples = 160;
  int fft_size = 512;
  int n_mels = 40;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;

  void validate(int sample_rate_hz) const;
};

struct MelFilterBank {
  // n_mels x (fft_size / 2 + 1)
  Eigen::MatrixXd weights;
  // Fractional FFT-bin position of each filter center.
  std::vector<double> center_bins;
};

/// Log-mel energies; column j is the frame starting at frame_times_s[j].
struct MelSpectrogram {
  Eigen::MatrixXd values;
  std::vector<double> frame_times_s;

  Eigen::Index n_frames() const { return values.cols(); }
  Eigen::Index n_mels() const { return values.rows(); }
};

inline constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz);
double mel_to_hz(double mel);

bool is_power_of_two(int n);

/// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& x);

/// |X[k]|^2 / fft_size for k in [0, fft_size/2], frame zero-padded to fft_size.
Eigen::VectorXd power_spectrum(std::span<const double> frame, int fft_size);

/// Periodic Hann window.
Eigen::VectorXd hann_window(int length);

MelFilterBank build_mel_filterbank(const FrameConfig& cfg, int sample_rate_hz);

int frame_count(Eigen::Index n_samples, const FrameConfig& cfg);

/// Reusable analyzer holding the window and filterbank for one configuration.
class LogMelAnalyzer {
 public:
  LogMelAnalyzer(const FrameConfig& cfg, int sample_rate_hz);

  MelSpectrogram compute(std::span<const double> samples,
                         double time_offset_s = 0.0) const;

  const FrameConfig& config() const { return cfg_; }
  const MelFilterBank& filterbank() const { return bank_; }
  int sample_rate_hz() const { return sample_rate_hz_; }

 private:
  FrameConfig cfg_;
  int sample_rate_hz_;
  Eigen::VectorXd window_;
  MelFilterBank bank_;
};

MelSpectrogram log_mel_frames(const AudioBuffer& audio, const FrameConfig& cfg);

/// RMS level in dBFS; -inf for silence.
double rms_dbfs(std::span<const double> samples);

}  // namespace voxdesk
