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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxdesk/analysis.hpp"
#include "voxdesk/errors.hpp"
#include "voxdesk/synthcorpus.hpp"
#include "voxdesk/training.hpp"
#include "voxdesk/wav.hpp"

namespace voxdesk::cli {
namespace fs = std::filesystem;
namespace {

constexpr const char* kPipelineFile = "pipeline.json";

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void save_pipeline_config(const PipelineConfig& cfg, const fs::path& dir) {
  const nlohmann::json j = {{"sample_rate_hz", cfg.sample_rate_hz},
                            {"window_s", cfg.window_s},
                            {"hop_s", cfg.hop_s},
                            {"gate_dbfs", cfg.gate_dbfs},
                            {"frame_window", cfg.frame.window_len_samples},
                            {"frame_hop", cfg.frame.hop_len_samples},
                            {"fft_size", cfg.frame.fft_size},
                            {"n_mels", cfg.frame.n_mels},
                            {"fmin_hz", cfg.frame.fmin_hz},
                            {"fmax_hz", cfg.frame.fmax_hz}};
  write_text(dir / kPipelineFile, j.dump(2) + "\n");
}

PipelineConfig load_pipeline_config(const fs::path& dir) {
  PipelineConfig cfg;
  std::ifstream f(dir / kPipelineFile);
  if (!f) return cfg;  // checkpoints trained with defaults
  try {
    const auto j = nlohmann::json::parse(f);
    cfg.sample_rate_hz = j.at("sample_rate_hz").get<int>();
    cfg.window_s = j.at("window_s").get<double>();
    cfg.hop_s = j.at("hop_s").get<double>();
    cfg.gate_dbfs = j.at("gate_dbfs").get<double>();
    cfg.frame.window_len_samples = j.at("frame_window").get<int>();
    cfg.frame.hop_len_samples = j.at("frame_hop").get<int>();
    cfg.frame.fft_size = j.at("fft_size").get<int>();
    cfg.frame.n_mels = j.at("n_mels").get<int>();
    cfg.frame.fmin_hz = j.at("fmin_hz").get<double>();
    cfg.frame.fmax_hz = j.at("fmax_hz").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError((dir / kPipelineFile).string() + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

void add_frame_options(CLI::App& app, PipelineConfig& cfg) {
  app.add_option("--n-mels", cfg.frame.n_mels, "Mel filters")->check(CLI::Range(1, 256));
  app.add_option("--frame-window", cfg.frame.window_len_samples, "STFT window (samples)")
      ->check(CLI::Range(16, 8192));
  app.add_option("--frame-hop", cfg.frame.hop_len_samples, "STFT hop (samples)")->check(CLI::Range(1, 8192));
  app.add_option("--fft", cfg.frame.fft_size, "FFT size (power of two)")->check(CLI::Range(16, 16384));
  app.add_option("--fmin", cfg.frame.fmin_hz, "Lowest filter edge (Hz)")->check(CLI::Range(0.0, 8000.0));
  app.add_option("--fmax", cfg.frame.fmax_hz, "Highest filter edge (Hz)")->check(CLI::Range(1.0, 8000.0));
}

int synth_cmd(const synth::CorpusConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  const auto manifest = synth::generate_corpus(cfg, out_dir);
  int speech = 0;
  for (const auto& e : manifest.entries) speech += e.is_speech ? 1 : 0;
  out << "wrote " << speech << " speech and " << manifest.entries.size() - speech << " noise files\n"
      << (out_dir / synth::kManifestFile).string() << "\n";
  return kOk;
}

int train_cmd(const train::TrainConfig& tc, const PipelineConfig& pc, const fs::path& corpus,
              const fs::path& ckpt_dir, std::ostream& out) {
  pc.validate();
  const auto data = train::load_dataset(corpus, pc);
  out << "loaded " << data.samples.size() << " windows from " << data.manifest.entries.size() << " files\n";
  const auto result = train::train_cascade(data, tc, pc, [&](const std::string& line) { out << line << "\n"; });
  save_bundle(result.bundle, ckpt_dir);
  save_pipeline_config(pc, ckpt_dir);
  out << "checkpoints written to " << ckpt_dir.string() << "\n";
  const bool has_test = std::any_of(data.manifest.entries.begin(), data.manifest.entries.end(),
                                    [](const auto& e) { return e.is_test && e.is_speech; });
  if (has_test) out << "\n" << train::format_eval_table(train::evaluate(data, result.bundle, pc));
  return kOk;
}

struct AnalyzeArgs {
  fs::path wav;
  fs::path ckpt_dir;
  std::string out_path;
  std::string plots_dir;
  AnalyzeOptions opts;
};

int analyze_cmd(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig pc = load_pipeline_config(a.ckpt_dir);
  const CascadeBundle bundle = load_bundle(a.ckpt_dir);
  const AudioBuffer audio = read_wav(a.wav, pc.sample_rate_hz);
  const AnalysisResult result = analyze_audio(audio, bundle, pc, a.opts);
  const std::string json = serialize_report(make_report(result, audio, a.wav.string(), bundle));
  if (a.out_path.empty() || a.out_path == "-") {
    out << json;
  } else {
    write_text(a.out_path, json);
  }
  if (!a.plots_dir.empty()) {
    const fs::path dir = a.plots_dir;
    try {
      write_text(dir / "distance_histogram.csv",
                 histogram_csv(distance_histograms(result.embeddings, result.embedding_speakers, 40)));
    } catch (const InvalidArgument& e) {
      err << "histogram skipped: " << e.what() << "\n";
    }
    try {
      write_text(dir / "projection_3d.csv",
                 projection_csv(spherical_pca_3d(result.embeddings), result.embedding_speakers));
    } catch (const Error& e) {
      err << "projection skipped: " << e.what() << "\n";
    }
  }
  return kOk;
}

struct EvalArgs {
  fs::path corpus;
  fs::path ckpt_dir;
  bool csv = false;
  std::string confusion_path;
  std::string plots_dir;
  double latency_audio_s = 60.0;
};

int eval_cmd(const EvalArgs& a, std::ostream& out) {
  const PipelineConfig pc = load_pipeline_config(a.ckpt_dir);
  const CascadeBundle bundle = load_bundle(a.ckpt_dir);
  const auto data = train::load_dataset(a.corpus, pc);
  train::EvalOptions opts;
  opts.latency_min_audio_s = a.latency_audio_s;
  const auto report = train::evaluate(data, bundle, pc, opts);
  out << (a.csv ? train::format_eval_csv(report) : train::format_eval_table(report));
  if (!a.confusion_path.empty()) write_text(a.confusion_path, train::format_confusion_csv(report));
  if (!a.plots_dir.empty()) {
    write_text(fs::path(a.plots_dir) / "distance_histogram.csv", histogram_csv(report.histograms));
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"voxdesk: desk-scale voice analysis (synth, train, analyze, eval)", "voxdesk"};
  app.require_subcommand(1, 1);

  synth::CorpusConfig corpus_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--speakers", corpus_cfg.n_speakers, "Number of speakers")->check(CLI::Range(2, 1000));
  synth->add_option("--utts", corpus_cfg.n_utts_per_speaker, "Utterances per speaker")
      ->check(CLI::Range(1, 10000));
  synth->add_option("--duration", corpus_cfg.duration_s, "Utterance length (s)")->check(CLI::Range(0.5, 600.0));
  synth->add_option("--noise-fraction", corpus_cfg.noise_fraction, "Fraction of noise files")
      ->check(CLI::Range(0.0, 0.9));
  synth->add_option("--test-fraction", corpus_cfg.test_fraction, "Held-out fraction")
      ->check(CLI::Range(0.0, 0.9));
  synth->add_option("--seed", corpus_cfg.root_seed, "Root seed");

  train::TrainConfig train_cfg;
  PipelineConfig train_pc;
  std::string train_corpus, train_out;
  bool shared_encoder = false, unfreeze = false;
  auto* tr = app.add_subcommand("train", "Train the cascade and write checkpoints");
  tr->add_option("--corpus", train_corpus, "Corpus directory with manifest.csv")->required();
  tr->add_option("--out", train_out, "Checkpoint directory (created if missing)")->required();
  tr->add_option("--classifier-epochs", train_cfg.classifier_epochs)->check(CLI::Range(1, 10000));
  tr->add_option("--encoder-epochs", train_cfg.encoder_epochs)->check(CLI::Range(1, 10000));
  tr->add_option("--emotion-epochs", train_cfg.emotion_epochs)->check(CLI::Range(1, 100000));
  tr->add_option("--lr", train_cfg.lr, "SGD learning rate")->check(CLI::Range(1e-6, 10.0));
  tr->add_option("--margin", train_cfg.margin, "Triplet margin")->check(CLI::Range(0.0, 2.0));
  tr->add_option("--beta", train_cfg.beta, "Triplet exponent scale")->check(CLI::Range(1e-3, 100.0));
  tr->add_option("--batch", train_cfg.batch_size, "Minibatch size")->check(CLI::Range(2, 4096));
  tr->add_option("--embedding-dim", train_cfg.embedding_dim)->check(CLI::Range(3, 1024));
  tr->add_option("--seed", train_cfg.seed, "Initialization and shuffling seed");
  tr->add_flag("--semi-hard", train_cfg.semi_hard, "Semi-hard negative mining");
  tr->add_flag("--shared-encoder", shared_encoder, "One encoder for both genders");
  tr->add_flag("--unfreeze-trunk", unfreeze, "Fine-tune the trunk with the emotion head");
  add_frame_options(*tr, train_pc);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Diarize a WAV file and emit a JSON report");
  analyze->add_option("wav", an.wav, "16-bit mono 16 kHz WAV")->required();
  analyze->add_option("--checkpoints", an.ckpt_dir, "Checkpoint directory")->required();
  analyze->add_option("--out", an.out_path, "Report path (default stdout)");
  analyze->add_option("--emit-plots", an.plots_dir, "Directory for histogram and projection CSVs");
  analyze->add_option("--tau", an.opts.tau, "Assignment temperature")->check(CLI::Range(1e-4, 10.0));
  analyze->add_option("--d-new", an.opts.d_new, "New-speaker distance threshold")->check(CLI::Range(0.0, 2.0));

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate checkpoints on the held-out split");
  eval->add_option("--corpus", ev.corpus, "Corpus directory with manifest.csv")->required();
  eval->add_option("--checkpoints", ev.ckpt_dir, "Checkpoint directory")->required();
  eval->add_flag("--csv", ev.csv, "Print metric,value CSV instead of a table");
  eval->add_option("--confusion", ev.confusion_path, "Write the emotion confusion matrix CSV here");
  eval->add_option("--emit-plots", ev.plots_dir, "Directory for the distance histogram CSV");
  eval->add_option("--latency-audio", ev.latency_audio_s, "Seconds of audio for the latency run")
      ->check(CLI::Range(1.0, 3600.0));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return synth_cmd(corpus_cfg, synth_out, out);
    if (*tr) {
      train_cfg.per_gender = !shared_encoder;
      train_cfg.freeze_trunk = !unfreeze;
      return train_cmd(train_cfg, train_pc, train_corpus, train_out, out);
    }
    if (*analyze) return analyze_cmd(an, out, err);
    if (*eval) return eval_cmd(ev, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kTrainingFailure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kFormat;
  } catch (const VersionError& e) {
    err << "error: " << e.what() << "\n";
    return kFormat;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}

}  // namespace voxdesk::cli
