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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "voxdesk/wav.hpp"

namespace voxdesk::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Magnitude of a two-pole resonance normalized to unity at DC.
double resonance_gain(double f, double center, double bandwidth) {
  const double c2 = center * center;
  return c2 / std::sqrt((c2 - f * f) * (c2 - f * f) + (bandwidth * f) * (bandwidth * f));
}

double contour_factor(Contour c, double excursion, double u, double t) {
  switch (c) {
    case Contour::kFlat:
      return 1.0;
    case Contour::kRising:
      return 1.0 - excursion + 2.0 * excursion * u;
    case Contour::kFalling:
      return 1.0 + excursion - 2.0 * excursion * u;
    case Contour::kRiseFall:
      return 1.0 + excursion * (1.0 - 2.0 * std::abs(2.0 * u - 1.0));
    case Contour::kFallRise:
      return 1.0 - excursion * (1.0 - 2.0 * std::abs(2.0 * u - 1.0));
    case Contour::kVibrato:
      return 1.0 + excursion * std::sin(kTwoPi * 6.0 * t);
  }
  return 1.0;
}

void normalize_peak(Eigen::VectorXd& x, double peak) {
  const double m = x.cwiseAbs().maxCoeff();
  if (m > 0.0) x *= peak / m;
}

}  // namespace

const std::array<ProsodyArchetype, kNumEmotions>& prosody_table() {
  //                label                contour            exc   rate  gain  tilt  breath
  static const std::array<ProsodyArchetype, kNumEmotions> table = {{
      {Emotion::kHappiness,  Contour::kRising,   0.08, 5.0, 0.80,  2.0, 0.00},
      {Emotion::kSadness,    Contour::kFalling,  0.06, 2.5, 0.25, -4.0, 0.03},
      {Emotion::kAnger,      Contour::kFlat,     0.03, 6.0, 0.95,  5.0, 0.00},
      {Emotion::kFear,       Contour::kVibrato,  0.06, 6.5, 0.45,  0.0, 0.06},
      {Emotion::kDisgust,    Contour::kFallRise, 0.06, 3.0, 0.55, -2.0, 0.04},
      {Emotion::kSurprise,   Contour::kRiseFall, 0.10, 4.5, 0.70,  3.0, 0.01},
      {Emotion::kBoredom,    Contour::kFlat,     0.01, 2.0, 0.30, -3.0, 0.00},
      {Emotion::kNeutrality, Contour::kFlat,     0.02, 4.0, 0.50,  0.0, 0.01},
  }};
  return table;
}

const ProsodyArchetype& default_prosody() {
  return prosody_table()[static_cast<int>(Emotion::kNeutrality)];
}

SynthSpeaker make_speaker(std::uint64_t seed, Gender gender, int speaker_id) {
  std::mt19937_64 rng(mix_seed(seed, 0x5eed));
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  SynthSpeaker s;
  s.speaker_id = speaker_id;
  s.gender = gender;
  s.seed = seed;
  const bool male = gender == Gender::kMale;
  s.f0_hz = male ? uniform(kMaleF0Min, kMaleF0Max) : uniform(kFemaleF0Min, kFemaleF0Max);
  // Vocal tract scale: shorter tracts push all formants up.
  const double scale = male ? uniform(0.92, 1.05) : uniform(1.08, 1.22);
  s.formants_hz = {uniform(350.0, 800.0) * scale, uniform(1000.0, 2000.0) * scale,
                   uniform(2300.0, 3000.0) * scale};
  s.bandwidths_hz = {uniform(60.0, 120.0), uniform(80.0, 150.0), uniform(100.0, 200.0)};
  s.tilt_db_per_octave = uniform(-14.0, -6.0);
  return s;
}

AudioBuffer render_utterance(const SynthSpeaker& speaker, double duration_s,
                             std::optional<Emotion> emotion_proxy, std::uint64_t seed,
                             int sample_rate_hz) {
  if (!(duration_s >= 0.5)) {
    throw InvalidArgument("render_utterance: duration must be >= 0.5 s, got " +
                          std::to_string(duration_s));
  }
  const ProsodyArchetype& pro =
      emotion_proxy ? prosody_table()[static_cast<int>(*emotion_proxy)] : default_prosody();
  std::mt19937_64 rng(mix_seed(seed, speaker.seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;

  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * sample_rate_hz));
  const double sr = sample_rate_hz;
  const double max_harmonic_hz = std::min(5000.0, 0.45 * sr);
  const double tilt = speaker.tilt_db_per_octave + pro.tilt_offset_db;
  constexpr int kBlock = 80;  // harmonic amplitudes refreshed every 5 ms at 16 kHz

  std::vector<double> harmonic_phase(128);
  for (double& p : harmonic_phase) p = kTwoPi * unit(rng);

  AudioBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples = Eigen::VectorXd::Zero(n);

  std::array<double, 3> formants = speaker.formants_hz;
  double syllable_phase = unit(rng) * 0.25;
  double syllable_rate = pro.syllable_rate_hz;
  double jitter = 0.0;
  double phase = 0.0;
  std::vector<double> amps;
  double f0 = speaker.f0_hz;
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const double t = start / sr;
    jitter = 0.95 * jitter + 0.05 * 0.01 * gauss(rng);
    f0 = speaker.f0_hz * contour_factor(pro.contour, pro.f0_excursion, t / duration_s, t) *
         (1.0 + jitter);
    const int n_harm = std::min<int>(static_cast<int>(max_harmonic_hz / f0),
                                     static_cast<int>(harmonic_phase.size()));
    amps.assign(n_harm, 0.0);
    for (int k = 1; k <= n_harm; ++k) {
      const double f = k * f0;
      double a = std::pow(10.0, tilt * std::log2(static_cast<double>(k)) / 20.0);
      for (int i = 0; i < 3; ++i) a *= resonance_gain(f, formants[i], speaker.bandwidths_hz[i]);
      amps[k - 1] = a;
    }
    const Eigen::Index stop = std::min<Eigen::Index>(n, start + kBlock);
    for (Eigen::Index i = start; i < stop; ++i) {
      phase += kTwoPi * f0 / sr;
      if (phase > kTwoPi) phase -= kTwoPi;
      syllable_phase += syllable_rate / sr;
      if (syllable_phase >= 1.0) {
        // New syllable: new vowel colour and slightly different timing.
        syllable_phase -= 1.0;
        syllable_rate = pro.syllable_rate_hz * (0.9 + 0.2 * unit(rng));
        for (int f = 0; f < 3; ++f) formants[f] = speaker.formants_hz[f] * (0.92 + 0.16 * unit(rng));
        std::sort(formants.begin(), formants.end());
      }
      double voiced = 0.0;
      for (int k = 0; k < n_harm; ++k) voiced += amps[k] * std::sin((k + 1) * phase + harmonic_phase[k]);
      const double s = std::sin(std::numbers::pi * syllable_phase);
      const double envelope = 0.03 + 0.97 * s * s;
      out.samples[i] = envelope * voiced;
    }
  }
  const double voiced_rms = std::sqrt(out.samples.squaredNorm() / std::max<Eigen::Index>(n, 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.samples[i] += voiced_rms * (pro.breathiness * gauss(rng) + 1e-3 * gauss(rng));
  }
  normalize_peak(out.samples, pro.peak_gain * (0.85 + 0.15 * unit(rng)));
  return out;
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kBabble: return "babble";
  }
  return "unknown";
}

AudioBuffer render_noise(NoiseKind kind, double duration_s, std::uint64_t seed, int sample_rate_hz) {
  if (!(duration_s > 0.0)) throw InvalidArgument("render_noise: duration must be positive");
  std::mt19937_64 rng(mix_seed(seed, 0x4015e));
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * sample_rate_hz));
  AudioBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples = Eigen::VectorXd::Zero(n);
  switch (kind) {
    case NoiseKind::kWhite:
      for (double& s : out.samples) s = gauss(rng);
      break;
    case NoiseKind::kPink: {
      // Paul Kellet's economy pink filter.
      double b0 = 0, b1 = 0, b2 = 0;
      for (double& s : out.samples) {
        const double w = gauss(rng);
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        s = b0 + b1 + b2 + w * 0.1848;
      }
      break;
    }
    case NoiseKind::kBabble: {
      const double render_s = std::max(duration_s, 0.5);
      for (int v = 0; v < 6; ++v) {
        const auto gender = unit(rng) < 0.5 ? Gender::kMale : Gender::kFemale;
        const SynthSpeaker talker = make_speaker(mix_seed(seed, 100 + v), gender);
        const auto emotion = static_cast<Emotion>(static_cast<int>(unit(rng) * kNumEmotions) % kNumEmotions);
        AudioBuffer voice = render_utterance(talker, render_s, emotion, mix_seed(seed, 200 + v), sample_rate_hz);
        normalize_peak(voice.samples, 1.0);
        const auto offset = static_cast<Eigen::Index>(unit(rng) * n);
        for (Eigen::Index i = 0; i < n; ++i) out.samples[i] += voice.samples[(i + offset) % voice.samples.size()];
      }
      double rms = std::sqrt(out.samples.squaredNorm() / std::max<Eigen::Index>(n, 1));
      for (double& s : out.samples) s += 0.1 * rms * gauss(rng);
      break;
    }
  }
  normalize_peak(out.samples, 0.1 + 0.5 * unit(rng));
  return out;
}

std::string speaker_name(int speaker_id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "spk%02d", speaker_id);
  return buf;
}

std::string format_manifest(const CorpusManifest& manifest) {
  std::ostringstream os;
  os << kManifestHeader << '\n';
  for (const auto& e : manifest.entries) {
    char dur[32];
    std::snprintf(dur, sizeof(dur), "%.3f", e.duration_s);
    os << e.path << ',' << (e.speaker_id ? speaker_name(*e.speaker_id) : "-") << ','
       << (e.gender ? to_string(*e.gender) : "-") << ',' << (e.is_speech ? "speech" : "noise") << ','
       << (e.emotion ? to_string(*e.emotion) : "-") << ',' << dur << ','
       << (e.is_test ? "test" : "train") << '\n';
  }
  return os.str();
}

CorpusManifest parse_manifest(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    return FormatError("manifest line " + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line)) throw FormatError("manifest line 1: empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader) throw fail("unexpected header '" + line + "'");
  CorpusManifest m;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 7) throw fail("expected 7 columns, got " + std::to_string(cols.size()));
    ManifestEntry e;
    e.path = cols[0];
    if (e.path.empty()) throw fail("empty path");
    if (cols[1] != "-") {
      if (cols[1].size() < 4 || cols[1].rfind("spk", 0) != 0) throw fail("bad speaker_id '" + cols[1] + "'");
      try {
        e.speaker_id = std::stoi(cols[1].substr(3));
      } catch (const std::exception&) {
        throw fail("bad speaker_id '" + cols[1] + "'");
      }
    }
    if (cols[2] != "-") {
      e.gender = parse_gender(cols[2]);
      if (!e.gender) throw fail("bad gender '" + cols[2] + "'");
    }
    if (cols[3] == "speech") {
      e.is_speech = true;
    } else if (cols[3] == "noise") {
      e.is_speech = false;
    } else {
      throw fail("bad vad label '" + cols[3] + "'");
    }
    if (cols[4] != "-") {
      e.emotion = parse_emotion(cols[4]);
      if (!e.emotion) throw fail("bad emotion '" + cols[4] + "'");
    }
    try {
      std::size_t used = 0;
      e.duration_s = std::stod(cols[5], &used);
      if (used != cols[5].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw fail("bad duration '" + cols[5] + "'");
    }
    if (cols[6] == "test") {
      e.is_test = true;
    } else if (cols[6] != "train") {
      throw fail("bad split '" + cols[6] + "'");
    }
    if (e.is_speech && (!e.speaker_id || !e.gender)) throw fail("speech row needs speaker_id and gender");
    m.entries.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << format_manifest(manifest);
  if (!out) throw IoError("failed writing manifest '" + path.string() + "'");
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_manifest(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<SynthSpeaker> corpus_speakers(const CorpusConfig& cfg) {
  std::vector<SynthSpeaker> speakers;
  for (int i = 0; i < cfg.n_speakers; ++i) {
    const Gender g = i % 2 == 0 ? Gender::kMale : Gender::kFemale;
    speakers.push_back(make_speaker(mix_seed(cfg.root_seed, i), g, i));
  }
  return speakers;
}

namespace {

// Marks round(fraction * n) of n items as test, chosen by a seeded shuffle.
std::vector<bool> split_mask(int n, double fraction, std::uint64_t seed) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<bool> test(n, false);
  const int n_test = static_cast<int>(std::lround(fraction * n));
  for (int i = 0; i < n_test; ++i) test[idx[i]] = true;
  return test;
}

}  // namespace

CorpusManifest generate_corpus(const CorpusConfig& cfg, const std::filesystem::path& out_dir) {
  if (cfg.n_speakers < 2) throw InvalidArgument("generate_corpus: need at least 2 speakers");
  if (cfg.n_utts_per_speaker < 1) throw InvalidArgument("generate_corpus: need at least 1 utterance per speaker");
  if (!(cfg.noise_fraction >= 0.0 && cfg.noise_fraction < 1.0)) {
    throw InvalidArgument("generate_corpus: noise_fraction must be in [0, 1)");
  }
  if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction <= 1.0)) {
    throw InvalidArgument("generate_corpus: test_fraction must be in [0, 1]");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory '" + out_dir.string() + "'");
  }

  CorpusManifest manifest;
  const auto speakers = corpus_speakers(cfg);
  for (const auto& spk : speakers) {
    const auto test = split_mask(cfg.n_utts_per_speaker, cfg.test_fraction,
                                 mix_seed(cfg.root_seed, 50000 + spk.speaker_id));
    for (int u = 0; u < cfg.n_utts_per_speaker; ++u) {
      const auto emotion = static_cast<Emotion>((u + 3 * spk.speaker_id) % kNumEmotions);
      const auto audio = render_utterance(spk, cfg.duration_s, emotion,
                                          mix_seed(cfg.root_seed, 100000 + 1000 * spk.speaker_id + u));
      char name[64];
      std::snprintf(name, sizeof(name), "%s_utt%03d.wav", speaker_name(spk.speaker_id).c_str(), u);
      write_wav(out_dir / name, audio);
      manifest.entries.push_back({name, spk.speaker_id, spk.gender, true, emotion,
                                  audio.duration_s(), static_cast<bool>(test[u])});
    }
  }
  const int n_speech = cfg.n_speakers * cfg.n_utts_per_speaker;
  const int n_noise =
      static_cast<int>(std::lround(cfg.noise_fraction / (1.0 - cfg.noise_fraction) * n_speech));
  const auto noise_test = split_mask(n_noise, cfg.test_fraction, mix_seed(cfg.root_seed, 60000));
  for (int k = 0; k < n_noise; ++k) {
    const auto kind = static_cast<NoiseKind>(k % 3);
    const auto audio = render_noise(kind, cfg.duration_s, mix_seed(cfg.root_seed, 200000 + k));
    char name[64];
    std::snprintf(name, sizeof(name), "noise_%03d_%s.wav", k, std::string(to_string(kind)).c_str());
    write_wav(out_dir / name, audio);
    manifest.entries.push_back({name, std::nullopt, std::nullopt, false, std::nullopt,
                                audio.duration_s(), static_cast<bool>(noise_test[k])});
  }
  write_manifest(out_dir / kManifestFile, manifest);
  return manifest;
}

}  // namespace voxdesk::synth
