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

#include "voxdesk/synthcorpus.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "voxdesk/errors.hpp"
#include "voxdesk/wav.hpp"

namespace voxdesk::synth {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("voxdesk_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Power at frequency f from a direct DFT correlation over the whole signal.
double PowerAt(const Eigen::VectorXd& x, double f, double sr) {
  double re = 0.0, im = 0.0;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const double w = 2.0 * M_PI * f * t / sr;
    re += x[t] * std::cos(w);
    im -= x[t] * std::sin(w);
  }
  return (re * re + im * im) / static_cast<double>(x.size());
}

TEST(SpeakerTest, DeterministicAndInBand) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = make_speaker(seed, Gender::kMale);
    EXPECT_EQ(m, make_speaker(seed, Gender::kMale));
    EXPECT_GE(m.f0_hz, 85.0);
    EXPECT_LE(m.f0_hz, 155.0);
    const auto f = make_speaker(seed, Gender::kFemale);
    EXPECT_GE(f.f0_hz, 165.0);
    EXPECT_LE(f.f0_hz, 255.0);
    for (const auto& s : {m, f}) {
      EXPECT_LT(s.formants_hz[0], s.formants_hz[1]);
      EXPECT_LT(s.formants_hz[1], s.formants_hz[2]);
      for (double b : s.bandwidths_hz) EXPECT_GT(b, 0.0);
      EXPECT_TRUE(std::isfinite(s.tilt_db_per_octave));
    }
  }
}

TEST(SpeakerTest, HundredSeedsNoDuplicates) {
  std::set<double> f0s;
  std::set<double> f1s;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = make_speaker(seed, Gender::kFemale);
    f0s.insert(s.f0_hz);
    f1s.insert(s.formants_hz[0]);
  }
  EXPECT_EQ(f0s.size(), 100u);
  EXPECT_EQ(f1s.size(), 100u);
}

TEST(RenderTest, LengthAndDeterminism) {
  const auto spk = make_speaker(11, Gender::kMale);
  const auto a = render_utterance(spk, 2.0, std::nullopt, 5);
  EXPECT_EQ(a.samples.size(), 32000);
  EXPECT_EQ(a.sample_rate_hz, 16000);
  const auto b = render_utterance(spk, 2.0, std::nullopt, 5);
  EXPECT_EQ(a.samples, b.samples);
  const auto c = render_utterance(spk, 2.0, std::nullopt, 6);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_LE(a.samples.cwiseAbs().maxCoeff(), 1.0);
}

TEST(RenderTest, PeakAmplitudeBoundedForEveryProxy) {
  const auto spk = make_speaker(3, Gender::kFemale);
  for (int e = 0; e < kNumEmotions; ++e) {
    const auto a = render_utterance(spk, 1.0, static_cast<Emotion>(e), 9);
    EXPECT_LE(a.samples.cwiseAbs().maxCoeff(), 1.0) << kEmotionNames[e];
    EXPECT_GT(a.samples.cwiseAbs().maxCoeff(), 0.01) << kEmotionNames[e];
  }
}

TEST(RenderTest, RejectsShortDuration) {
  const auto spk = make_speaker(1, Gender::kMale);
  EXPECT_THROW(render_utterance(spk, 0.4, std::nullopt, 1), InvalidArgument);
}

TEST(RenderTest, HarmonicsOf120Hz) {
  auto spk = make_speaker(21, Gender::kMale);
  spk.f0_hz = 120.0;
  const auto a = render_utterance(spk, 2.0, Emotion::kBoredom, 4);  // flattest contour
  for (int k = 1; k <= 6; ++k) {
    double peak = 0.0;
    for (double df = -3.0; df <= 3.0; df += 0.5) peak = std::max(peak, PowerAt(a.samples, 120.0 * k + df, 16000));
    const double between = PowerAt(a.samples, 120.0 * (k + 0.5), 16000);
    EXPECT_GT(peak, 10.0 * between) << "harmonic " << k;
  }
}

TEST(NoiseTest, KindsAreDistinctAndDeterministic) {
  for (auto kind : {NoiseKind::kWhite, NoiseKind::kPink, NoiseKind::kBabble}) {
    const auto a = render_noise(kind, 1.0, 7);
    EXPECT_EQ(a.samples.size(), 16000);
    EXPECT_EQ(a.samples, render_noise(kind, 1.0, 7).samples);
    EXPECT_LE(a.samples.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(ManifestTest, RoundTrip) {
  CorpusManifest m;
  m.entries.push_back({"spk00_utt000.wav", 0, Gender::kMale, true, Emotion::kAnger, 2.0, false});
  m.entries.push_back({"noise_000_white.wav", std::nullopt, std::nullopt, false, std::nullopt, 2.0, true});
  const std::string text = format_manifest(m);
  EXPECT_EQ(text.substr(0, text.find('\n')), kManifestHeader);
  EXPECT_EQ(parse_manifest(text), m);
}

TEST(ManifestTest, ErrorsCarryLineNumbers) {
  const std::string header(kManifestHeader);
  const std::string bad = header + "\nspk00_utt000.wav,spk00,male,speech,Anger,2.000,train\nx.wav,spk01,robot,speech,Anger,2.0,train\n";
  try {
    parse_manifest(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_manifest("path,speaker\n"), FormatError);
  EXPECT_THROW(parse_manifest(header + "\na.wav,spk00,male,speech,Anger,2.0\n"), FormatError);
}

class CorpusTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(TempDir("corpus_test"));
    manifest_ = new CorpusManifest(generate_corpus(CorpusConfig{}, *dir_));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
    delete manifest_;
  }
  static fs::path* dir_;
  static CorpusManifest* manifest_;
};
fs::path* CorpusTest::dir_ = nullptr;
CorpusManifest* CorpusTest::manifest_ = nullptr;

TEST_F(CorpusTest, Counts) {
  int speech = 0, noise = 0, speech_test = 0;
  std::set<std::string> paths;
  std::map<int, Gender> genders;
  std::map<Emotion, int> emotions;
  for (const auto& e : manifest_->entries) {
    paths.insert(e.path);
    if (e.is_speech) {
      ++speech;
      speech_test += e.is_test ? 1 : 0;
      genders[*e.speaker_id] = *e.gender;
      ++emotions[*e.emotion];
    } else {
      ++noise;
    }
    EXPECT_TRUE(fs::exists(*dir_ / e.path)) << e.path;
  }
  EXPECT_EQ(speech, 160);
  EXPECT_EQ(noise, 40);
  EXPECT_EQ(speech_test, 32);
  EXPECT_EQ(paths.size(), manifest_->entries.size());
  ASSERT_EQ(genders.size(), 8u);
  for (const auto& [id, g] : genders) EXPECT_EQ(g, id % 2 == 0 ? Gender::kMale : Gender::kFemale);
  EXPECT_EQ(emotions.size(), static_cast<std::size_t>(kNumEmotions));
  for (const auto& [e, n] : emotions) EXPECT_EQ(n, 20);
}

TEST_F(CorpusTest, ManifestOnDiskMatches) {
  EXPECT_EQ(read_manifest(*dir_ / kManifestFile), *manifest_);
  const auto first = read_wav(*dir_ / manifest_->entries.front().path);
  EXPECT_EQ(first.samples.size(), 32000);
}

TEST_F(CorpusTest, ReproducibleFromSeed) {
  const fs::path again = TempDir("corpus_test_again");
  const auto m = generate_corpus(CorpusConfig{}, again);
  EXPECT_EQ(m, *manifest_);
  EXPECT_EQ(Slurp(again / kManifestFile), Slurp(*dir_ / kManifestFile));
  for (const auto& e : m.entries) {
    ASSERT_EQ(Slurp(again / e.path), Slurp(*dir_ / e.path)) << e.path;
  }
  fs::remove_all(again);
}

TEST_F(CorpusTest, RawLogMelCentroidsBeatChance) {
  const LogMelAnalyzer analyzer(FrameConfig{}, 16000);
  std::map<int, std::vector<Eigen::VectorXd>> train;
  std::vector<std::pair<int, Eigen::VectorXd>> test;
  for (const auto& e : manifest_->entries) {
    if (!e.is_speech) continue;
    const auto audio = read_wav(*dir_ / e.path);
    const auto mel = analyzer.compute(std::span<const double>(audio.samples.data(), audio.samples.size()));
    const Eigen::VectorXd mean = mel.values.rowwise().mean();
    if (e.is_test) {
      test.emplace_back(*e.speaker_id, mean);
    } else {
      train[*e.speaker_id].push_back(mean);
    }
  }
  std::map<int, Eigen::VectorXd> centroids;
  for (const auto& [id, list] : train) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(list.front().size());
    for (const auto& v : list) c += v;
    centroids[id] = c / static_cast<double>(list.size());
  }
  int correct = 0;
  for (const auto& [id, v] : test) {
    int best = -1;
    double best_d = 1e300;
    for (const auto& [cid, c] : centroids) {
      const double d = (v - c).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = cid;
      }
    }
    correct += best == id ? 1 : 0;
  }
  EXPECT_GT(static_cast<double>(correct) / test.size(), 1.0 / 8.0);
}

TEST(CorpusErrorsTest, UnwritableDirectoryIsIoError) {
  CorpusConfig cfg;
  cfg.n_utts_per_speaker = 1;
  EXPECT_THROW(generate_corpus(cfg, "/proc/voxdesk_cannot_write_here"), IoError);
}

TEST(CorpusErrorsTest, TooFewSpeakers) {
  CorpusConfig cfg;
  cfg.n_speakers = 1;
  EXPECT_THROW(generate_corpus(cfg, TempDir("never")), InvalidArgument);
}

}  // namespace
}  // namespace voxdesk::synth
