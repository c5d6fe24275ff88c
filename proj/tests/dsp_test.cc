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
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace voxdesk {
namespace {

// O(N^2) reference DFT, independent of the radix-2 path.
std::vector<double> NaivePowerSpectrum(const std::vector<double>& frame, int n) {
  std::vector<double> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (int t = 0; t < static_cast<int>(frame.size()); ++t) {
      acc += frame[t] * std::polar(1.0, -2.0 * std::numbers::pi * k * t / n);
    }
    out[k] = std::norm(acc) / n;
  }
  return out;
}

TEST(MelScaleTest, KnownValues) {
  EXPECT_DOUBLE_EQ(hz_to_mel(0.0), 0.0);
  EXPECT_NEAR(hz_to_mel(700.0), 781.17, 0.005);
  EXPECT_NEAR(hz_to_mel(8000.0), 2840.023, 0.001);
  EXPECT_DOUBLE_EQ(mel_to_hz(0.0), 0.0);
  EXPECT_NEAR(mel_to_hz(781.17), 700.0, 0.01);
  EXPECT_NEAR(mel_to_hz(2840.023), 8000.0, 0.1);
}

TEST(MelScaleTest, RejectsBadInput) {
  EXPECT_THROW(hz_to_mel(-1.0), InvalidArgument);
  EXPECT_THROW(hz_to_mel(std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
  EXPECT_THROW(hz_to_mel(std::numeric_limits<double>::infinity()), InvalidArgument);
  EXPECT_THROW(mel_to_hz(-0.5), InvalidArgument);
}

TEST(MelScaleTest, RoundTripAndMonotoneOnRandomGrid) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> freq(0.0, 24000.0);
  std::vector<double> grid(2000);
  for (double& f : grid) f = freq(rng);
  std::sort(grid.begin(), grid.end());
  double prev = -1.0;
  for (double f : grid) {
    const double m = hz_to_mel(f);
    EXPECT_GT(m, prev);
    prev = m;
    const double back = mel_to_hz(m);
    EXPECT_LE(std::abs(back - f), 1e-9 * std::max(f, 1.0)) << f;
  }
}

TEST(FftTest, MatchesNaiveDftOnRandomFrames) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise;
  for (int n = 4; n <= 512; n *= 2) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> frame(n - trial);
      for (double& v : frame) v = noise(rng);
      const auto expected = NaivePowerSpectrum(frame, n);
      const Eigen::VectorXd got = power_spectrum(frame, n);
      ASSERT_EQ(got.size(), n / 2 + 1);
      for (int k = 0; k <= n / 2; ++k) EXPECT_NEAR(got[k], expected[k], 1e-6) << n;
    }
  }
}

TEST(FftTest, ConstantFrame) {
  const std::vector<double> frame{1, 1, 1, 1};
  const Eigen::VectorXd p = power_spectrum(frame, 4);
  EXPECT_NEAR(p[0], 4.0, 1e-12);
  EXPECT_NEAR(p[1], 0.0, 1e-12);
  EXPECT_NEAR(p[2], 0.0, 1e-12);
}

TEST(FftTest, ZeroFrameAndSinusoidPeak) {
  const std::vector<double> zeros(64, 0.0);
  EXPECT_EQ(power_spectrum(zeros, 64).maxCoeff(), 0.0);
  std::vector<double> tone(64);
  for (int t = 0; t < 64; ++t) tone[t] = std::sin(2 * std::numbers::pi * 3 * t / 64.0);
  Eigen::Index arg = 0;
  power_spectrum(tone, 64).maxCoeff(&arg);
  EXPECT_EQ(arg, 3);
}

TEST(FftTest, RejectsNonPowerOfTwo) {
  const std::vector<double> frame(10, 0.0);
  EXPECT_THROW(power_spectrum(frame, 12), ConfigError);
  std::vector<std::complex<double>> buf(6);
  EXPECT_THROW(fft_inplace(buf), ConfigError);
}

TEST(FilterBankTest, ThreeFilterGeometry) {
  FrameConfig cfg;
  cfg.n_mels = 3;
  const MelFilterBank bank = build_mel_filterbank(cfg, 16000);
  EXPECT_EQ(bank.weights.rows(), 3);
  EXPECT_EQ(bank.weights.cols(), 257);
  const double step = hz_to_mel(8000.0) / 4.0;
  EXPECT_NEAR(step, 710.0, 0.01);
  const double first_center_hz = bank.center_bins[0] * 16000.0 / 512.0;
  EXPECT_NEAR(first_center_hz, 614.3, 0.1);
  EXPECT_NEAR(mel_to_hz(step), first_center_hz, 1e-9);
}

TEST(FilterBankTest, DefaultShapeAndInvariants) {
  const FrameConfig cfg;
  const MelFilterBank bank = build_mel_filterbank(cfg, 16000);
  ASSERT_EQ(bank.weights.rows(), 40);
  ASSERT_EQ(bank.weights.cols(), 257);
  EXPECT_TRUE(bank.weights.allFinite());
  EXPECT_GE(bank.weights.minCoeff(), 0.0);
  for (int m = 0; m < 40; ++m) {
    EXPECT_GT(bank.weights.row(m).maxCoeff(), 0.0);
    if (m > 0) EXPECT_GT(bank.center_bins[m], bank.center_bins[m - 1]);
  }
}

TEST(FilterBankTest, TooManyFiltersIsConfigError) {
  FrameConfig cfg;
  cfg.n_mels = 200;
  EXPECT_THROW(build_mel_filterbank(cfg, 16000), ConfigError);
  FrameConfig bad;
  bad.fft_size = 500;
  EXPECT_THROW(build_mel_filterbank(bad, 16000), ConfigError);
  FrameConfig nyquist;
  nyquist.fmax_hz = 9000;
  EXPECT_THROW(build_mel_filterbank(nyquist, 16000), ConfigError);
}

AudioBuffer Sine(double hz, double seconds, double amp = 0.5) {
  AudioBuffer a;
  a.samples.resize(static_cast<Eigen::Index>(seconds * a.sample_rate_hz));
  for (Eigen::Index i = 0; i < a.samples.size(); ++i) {
    a.samples[i] = amp * std::sin(2 * std::numbers::pi * hz * i / a.sample_rate_hz);
  }
  return a;
}

TEST(LogMelTest, FrameCountAndTimes) {
  const MelSpectrogram spectro = log_mel_frames(Sine(440, 1.0), FrameConfig{});
  EXPECT_EQ(spectro.n_frames(), 98);
  EXPECT_EQ(spectro.n_mels(), 40);
  for (std::size_t i = 1; i < spectro.frame_times_s.size(); ++i) {
    EXPECT_NEAR(spectro.frame_times_s[i] - spectro.frame_times_s[i - 1], 0.01, 1e-12);
  }
  EXPECT_TRUE(spectro.values.allFinite());
}

TEST(LogMelTest, ToneAtFilterCenterPeaksInThatFilter) {
  const FrameConfig cfg;
  const MelFilterBank bank = build_mel_filterbank(cfg, 16000);
  for (int k : {3, 10, 20, 35}) {
    const double hz = bank.center_bins[k] * 16000.0 / cfg.fft_size;
    const MelSpectrogram spectro = log_mel_frames(Sine(hz, 0.2), cfg);
    for (Eigen::Index f = 0; f < spectro.n_frames(); ++f) {
      Eigen::Index arg = 0;
      spectro.values.col(f).maxCoeff(&arg);
      EXPECT_EQ(arg, k) << hz;
    }
  }
}

TEST(LogMelTest, SilenceHitsFloor) {
  AudioBuffer silent;
  silent.samples = Eigen::VectorXd::Zero(16000);
  const MelSpectrogram spectro = log_mel_frames(silent, FrameConfig{});
  EXPECT_TRUE((spectro.values.array() == std::log(1e-10)).all());
}

TEST(LogMelTest, ShortAudioIsEmptyInput) {
  AudioBuffer a;
  a.samples = Eigen::VectorXd::Zero(399);
  EXPECT_THROW(log_mel_frames(a, FrameConfig{}), EmptyInputError);
}

TEST(LogMelTest, DeterministicAndShiftEquivariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  AudioBuffer a;
  a.samples.resize(8000);
  for (double& s : a.samples) s = u(rng);
  const FrameConfig cfg;
  const MelSpectrogram first = log_mel_frames(a, cfg);
  const MelSpectrogram second = log_mel_frames(a, cfg);
  EXPECT_TRUE((first.values.array() == second.values.array()).all());

  AudioBuffer shifted;
  shifted.samples = a.samples.tail(a.samples.size() - cfg.hop_len_samples);
  const MelSpectrogram moved = log_mel_frames(shifted, cfg);
  ASSERT_EQ(moved.n_frames(), first.n_frames() - 1);
  for (Eigen::Index f = 0; f < moved.n_frames(); ++f) {
    EXPECT_LT((moved.values.col(f) - first.values.col(f + 1)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(RmsTest, LevelOfSineAndSilence) {
  const AudioBuffer tone = Sine(1000, 1.0, 1.0);
  EXPECT_NEAR(rms_dbfs(std::span<const double>(tone.samples.data(), tone.samples.size())),
              -3.0103, 1e-3);
  const std::vector<double> zeros(100, 0.0);
  EXPECT_EQ(rms_dbfs(zeros), -std::numeric_limits<double>::infinity());
}

}  // namespace
}  // namespace voxdesk
