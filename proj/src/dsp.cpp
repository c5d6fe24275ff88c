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

#include "voxdesk/dsp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace voxdesk {

void AudioBuffer::validate() const {
  if (sample_rate_hz <= 0) {
    throw InvalidArgument("sample rate must be positive, got " +
                          std::to_string(sample_rate_hz));
  }
  if (!samples.allFinite()) {
    throw InvalidArgument("audio contains non-finite samples");
  }
}

void FrameConfig::validate(int sample_rate_hz) const {
  if (window_len_samples <= 0 || hop_len_samples <= 0 || n_mels <= 0) {
    throw ConfigError("window, hop and n_mels must be positive");
  }
  if (hop_len_samples > window_len_samples) {
    throw ConfigError("hop must not exceed window length");
  }
  if (!is_power_of_two(fft_size)) {
    throw ConfigError("fft_size must be a power of two, got " +
                      std::to_string(fft_size));
  }
  if (fft_size < window_len_samples) {
    throw ConfigError("fft_size must be >= window length");
  }
  if (!(fmin_hz >= 0.0) || !(fmin_hz < fmax_hz) ||
      fmax_hz > sample_rate_hz / 2.0) {
    throw ConfigError("need 0 <= fmin < fmax <= sample_rate / 2");
  }
}

double hz_to_mel(double hz) {
  if (!std::isfinite(hz) || hz < 0.0) {
    throw InvalidArgument("hz_to_mel: frequency must be finite and >= 0");
  }
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
  if (!std::isfinite(mel) || mel < 0.0) {
    throw InvalidArgument("mel_to_hz: mel value must be finite and >= 0");
  }
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()) ||
      !is_power_of_two(static_cast<int>(n))) {
    throw ConfigError("FFT size must be a power of two, got " +
                      std::to_string(n));
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Direct twiddles keep rounding error flat as len grows.
        const std::complex<double> w = std::polar(1.0, angle * k);
        const auto t = w * x[start + k + half];
        const auto u = x[start + k];
        x[start + k] = u + t;
        x[start + k + half] = u - t;
      }
    }
  }
}

Eigen::VectorXd power_spectrum(std::span<const double> frame, int fft_size) {
  if (!is_power_of_two(fft_size)) {
    throw ConfigError("fft_size must be a power of two, got " +
                      std::to_string(fft_size));
  }
  if (frame.size() > static_cast<std::size_t>(fft_size)) {
    throw InvalidArgument("frame longer than fft_size");
  }
  std::vector<std::complex<double>> buf(fft_size);
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
  fft_inplace(buf);
  Eigen::VectorXd p(fft_size / 2 + 1);
  for (int k = 0; k <= fft_size / 2; ++k) {
    p[k] = std::norm(buf[k]) / fft_size;
  }
  return p;
}

Eigen::VectorXd hann_window(int length) {
  Eigen::VectorXd w(length);
  for (int i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  }
  return w;
}

MelFilterBank build_mel_filterbank(const FrameConfig& cfg, int sample_rate_hz) {
  cfg.validate(sample_rate_hz);
  const int n_bins = cfg.fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.fmax_hz);

  std::vector<double> edge_bins(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1);
    edge_bins[i] = mel_to_hz(mel) * cfg.fft_size / sample_rate_hz;
  }

  MelFilterBank bank;
  bank.weights = Eigen::MatrixXd::Zero(cfg.n_mels, n_bins);
  bank.center_bins.assign(edge_bins.begin() + 1, edge_bins.end() - 1);
  for (int m = 0; m + 1 < cfg.n_mels; ++m) {
    if (std::lround(bank.center_bins[m]) ==
        std::lround(bank.center_bins[m + 1])) {
      throw ConfigError("n_mels=" + std::to_string(cfg.n_mels) +
                        " too large for fft_size=" +
                        std::to_string(cfg.fft_size) + ": filters " +
                        std::to_string(m) + " and " + std::to_string(m + 1) +
                        " share a center bin");
    }
  }
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edge_bins[m];
    const double center = edge_bins[m + 1];
    const double right = edge_bins[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      double w = 0.0;
      if (k > left && k <= center) {
        w = (k - left) / (center - left);
      } else if (k > center && k < right) {
        w = (right - k) / (right - center);
      }
      bank.weights(m, k) = w;
    }
    if (!(bank.weights.row(m).maxCoeff() > 0.0)) {
      throw ConfigError("mel filter " + std::to_string(m) +
                        " covers no FFT bin");
    }
  }
  return bank;
}

int frame_count(Eigen::Index n_samples, const FrameConfig& cfg) {
  if (n_samples < cfg.window_len_samples) return 0;
  return static_cast<int>((n_samples - cfg.window_len_samples) /
                          cfg.hop_len_samples) +
         1;
}

LogMelAnalyzer::LogMelAnalyzer(const FrameConfig& cfg, int sample_rate_hz)
    : cfg_(cfg),
      sample_rate_hz_(sample_rate_hz),
      window_(hann_window(cfg.window_len_samples)),
      bank_(build_mel_filterbank(cfg, sample_rate_hz)) {}

MelSpectrogram LogMelAnalyzer::compute(std::span<const double> samples,
                                       double time_offset_s) const {
  const int n_frames = frame_count(static_cast<Eigen::Index>(samples.size()), cfg_);
  if (n_frames == 0) {
    throw EmptyInputError("audio shorter than one analysis window (" +
                          std::to_string(samples.size()) + " < " +
                          std::to_string(cfg_.window_len_samples) +
                          " samples)");
  }
  MelSpectrogram out;
  out.values.resize(cfg_.n_mels, n_frames);
  out.frame_times_s.resize(n_frames);
  std::vector<double> frame(cfg_.window_len_samples);
  const double log_floor = std::log(kLogFloor);
  for (int f = 0; f < n_frames; ++f) {
    const std::size_t start = static_cast<std::size_t>(f) * cfg_.hop_len_samples;
    for (int i = 0; i < cfg_.window_len_samples; ++i) {
      frame[i] = samples[start + i] * window_[i];
    }
    const Eigen::VectorXd power = power_spectrum(frame, cfg_.fft_size);
    const Eigen::VectorXd energies = bank_.weights * power;
    for (int m = 0; m < cfg_.n_mels; ++m) {
      const double e = energies[m];
      out.values(m, f) = e > kLogFloor ? std::log(e) : log_floor;
    }
    out.frame_times_s[f] =
        time_offset_s + static_cast<double>(start) / sample_rate_hz_;
  }
  return out;
}

MelSpectrogram log_mel_frames(const AudioBuffer& audio, const FrameConfig& cfg) {
  audio.validate();
  const LogMelAnalyzer analyzer(cfg, audio.sample_rate_hz);
  return analyzer.compute(
      std::span<const double>(audio.samples.data(), audio.samples.size()));
}

double rms_dbfs(std::span<const double> samples) {
  if (samples.empty()) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  const double rms = std::sqrt(acc / samples.size());
  if (rms <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(rms);
}

}  // namespace voxdesk
