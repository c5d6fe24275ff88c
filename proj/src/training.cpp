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

#include "voxdesk/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "voxdesk/nnet/losses.hpp"
#include "voxdesk/nnet/optim.hpp"
#include "voxdesk/wav.hpp"

namespace voxdesk::train {
namespace {

using FloatGrads = nnet::Gradients<float>;

void emit(const Log& log, const std::string& line) {
  if (log) log(line);
}

std::string epoch_line(const std::string& stage, int epoch, double loss) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "[%s] epoch %d loss %.6f", stage.c_str(), epoch, loss);
  return buf;
}

void check_loss(double loss, const std::string& stage, int epoch) {
  if (!std::isfinite(loss)) {
    throw DivergenceError("training diverged in stage '" + stage + "' at epoch " +
                          std::to_string(epoch) + ": loss is not finite");
  }
}

void check_logits(const nnet::Tensor<float>& logits, const std::string& stage, int epoch) {
  if (!logits.all_finite()) {
    throw DivergenceError("training diverged in stage '" + stage + "' at epoch " +
                          std::to_string(epoch) + ": logits are not finite");
  }
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& corpus_dir, const PipelineConfig& cfg) {
  cfg.validate();
  Dataset data;
  data.root = corpus_dir;
  data.manifest = synth::read_manifest(corpus_dir / synth::kManifestFile);
  const LogMelAnalyzer analyzer(cfg.frame, cfg.sample_rate_hz);
  for (std::size_t f = 0; f < data.manifest.entries.size(); ++f) {
    const auto& entry = data.manifest.entries[f];
    AudioBuffer audio = read_wav(corpus_dir / entry.path, cfg.sample_rate_hz);
    const int n_windows = window_count(audio.samples.size(), cfg);
    for (int w = 0; w < n_windows; ++w) {
      const std::int64_t start = static_cast<std::int64_t>(w) * cfg.hop_samples();
      Sample s;
      s.window = make_window(
          std::span<const double>(audio.samples.data() + start, cfg.window_samples()),
          static_cast<double>(start) / cfg.sample_rate_hz, analyzer);
      s.input = window_input(s.window, cfg.norm);
      s.file_index = static_cast<int>(f);
      s.is_speech = entry.is_speech;
      s.is_test = entry.is_test;
      s.speaker = entry.speaker_id.value_or(-1);
      s.gender = entry.gender;
      s.emotion = entry.emotion;
      data.samples.push_back(std::move(s));
    }
    const std::int64_t n = audio.samples.size();
    const std::int64_t hop = cfg.hop_samples(), keep = cfg.window_samples() - hop;
    if (entry.is_speech && n >= keep && hop < cfg.window_samples()) {
      for (const bool leading : {true, false}) {
        Eigen::VectorXd padded = Eigen::VectorXd::Zero(cfg.window_samples());
        if (leading) {
          padded.tail(keep) = audio.samples.head(keep);
        } else {
          padded.head(keep) = audio.samples.tail(keep);
        }
        Sample s;
        s.window = make_window(std::span<const double>(padded.data(), padded.size()), 0.0, analyzer);
        s.input = window_input(s.window, cfg.norm);
        s.file_index = static_cast<int>(f);
        s.is_speech = true;
        s.is_test = entry.is_test;
        s.speaker = entry.speaker_id.value_or(-1);
        s.gender = entry.gender;
        s.emotion = entry.emotion;
        data.edge_samples.push_back(std::move(s));
      }
    }
    data.audio.push_back(std::move(audio));
  }
  if (data.samples.empty()) throw InvalidArgument("corpus '" + corpus_dir.string() + "' yields no windows");
  return data;
}

std::vector<double> train_classifier(nnet::Model<float>& model,
                                     const std::vector<const nnet::Tensor<float>*>& inputs,
                                     const std::vector<int>& labels, int epochs, double lr,
                                     int batch_size, std::uint64_t seed, const Log& log) {
  if (inputs.size() != labels.size() || inputs.empty()) {
    throw InvalidArgument("train_classifier: need matching, nonempty inputs and labels");
  }
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<double> losses;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t b = 0; b < order.size(); b += batch_size) {
      const std::size_t end = std::min(order.size(), b + batch_size);
      const float scale = 1.0f / static_cast<float>(end - b);
      FloatGrads grads;
      for (std::size_t k = b; k < end; ++k) {
        const auto trace = nnet::forward_logits(model, *inputs[order[k]]);
        check_logits(trace.output(), model.tag(), epoch + 1);
        const auto loss = nnet::softmax_cross_entropy(trace.output(), labels[order[k]]);
        total += loss.loss;
        nnet::accumulate(grads, nnet::backward(model, trace, loss.grad).params, scale);
      }
      nnet::sgd_step(model, grads, static_cast<float>(lr));
    }
    losses.push_back(total / static_cast<double>(order.size()));
    check_loss(losses.back(), model.tag(), epoch + 1);
    emit(log, epoch_line(model.tag(), epoch + 1, losses.back()));
  }
  return losses;
}

std::vector<double> train_encoder(Encoder& encoder,
                                  const std::vector<const nnet::Tensor<float>*>& inputs,
                                  const std::vector<int>& speakers, const TrainConfig& cfg,
                                  std::uint64_t seed, const Log& log) {
  if (inputs.size() != speakers.size() || inputs.empty()) {
    throw InvalidArgument("train_encoder: need matching, nonempty inputs and labels");
  }
  std::map<int, std::vector<std::size_t>> by_speaker;
  for (std::size_t i = 0; i < speakers.size(); ++i) by_speaker[speakers[i]].push_back(i);
  if (by_speaker.size() < 2) throw InvalidArgument("train_encoder: need at least 2 speakers");
  std::vector<int> ids;
  for (const auto& [id, list] : by_speaker) {
    if (list.size() < 2) throw InvalidArgument("train_encoder: every speaker needs 2+ windows");
    ids.push_back(id);
  }
  const int n_spk = static_cast<int>(std::min<std::size_t>(ids.size(), std::max(2, cfg.batch_size / 4)));
  const int per_spk = std::max(2, cfg.batch_size / n_spk);
  const int steps = std::max<int>(1, static_cast<int>(inputs.size()) / (n_spk * per_spk));
  const nnet::TripletParams tp{cfg.margin, cfg.beta};
  const std::string stage = encoder.trunk.tag();

  std::mt19937_64 rng(seed);
  std::vector<double> losses;
  for (int epoch = 0; epoch < cfg.encoder_epochs; ++epoch) {
    double total = 0.0;
    for (int step = 0; step < steps; ++step) {
      // P speakers x K windows.
      std::vector<int> chosen = ids;
      std::shuffle(chosen.begin(), chosen.end(), rng);
      chosen.resize(n_spk);
      std::vector<std::size_t> batch;
      std::vector<int> batch_spk;
      for (int id : chosen) {
        auto pool = by_speaker[id];
        std::shuffle(pool.begin(), pool.end(), rng);
        for (int k = 0; k < per_spk && k < static_cast<int>(pool.size()); ++k) {
          batch.push_back(pool[k]);
          batch_spk.push_back(id);
        }
      }
      const std::size_t n = batch.size();
      std::vector<nnet::Trace<float>> trunk_traces(n), proj_traces(n);
      std::vector<Eigen::VectorXd> emb(n);
      for (std::size_t i = 0; i < n; ++i) {
        trunk_traces[i] = nnet::forward(encoder.trunk, *inputs[batch[i]]);
        proj_traces[i] = nnet::forward(encoder.projection, trunk_traces[i].output());
        emb[i] = proj_traces[i].output().data().cast<double>();
        if (!emb[i].allFinite() || std::abs(emb[i].norm() - 1.0) > 1e-3) {
          throw DivergenceError("training diverged in stage '" + stage + "' at epoch " +
                                std::to_string(epoch + 1) + ": embeddings are no longer unit norm");
        }
      }
      nnet::TripletBatch<double> tb;
      std::vector<std::array<std::size_t, 3>> roles;
      for (std::size_t a = 0; a < n; ++a) {
        std::vector<std::size_t> pos, neg;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == a) continue;
          (batch_spk[j] == batch_spk[a] ? pos : neg).push_back(j);
        }
        if (pos.empty() || neg.empty()) continue;
        const std::size_t p = pos[std::uniform_int_distribution<std::size_t>(0, pos.size() - 1)(rng)];
        std::size_t q = neg[std::uniform_int_distribution<std::size_t>(0, neg.size() - 1)(rng)];
        if (cfg.semi_hard) {
          const double d_ap = cosine_distance(emb[a], emb[p]);
          double best = 3.0;
          for (std::size_t j : neg) {
            const double d = cosine_distance(emb[a], emb[j]);
            if (d > d_ap && d < best) {
              best = d;
              q = j;
            }
          }
        }
        tb.anchors.push_back(emb[a]);
        tb.positives.push_back(emb[p]);
        tb.negatives.push_back(emb[q]);
        roles.push_back({a, p, q});
      }
      const auto loss = nnet::exp_triplet_loss(tb, tp, 1e-5);
      total += loss.loss;
      std::vector<Eigen::VectorXd> grad(n, Eigen::VectorXd::Zero(emb[0].size()));
      for (std::size_t t = 0; t < roles.size(); ++t) {
        grad[roles[t][0]] += loss.grad_anchors[t];
        grad[roles[t][1]] += loss.grad_positives[t];
        grad[roles[t][2]] += loss.grad_negatives[t];
      }
      FloatGrads trunk_grads, proj_grads;
      for (std::size_t i = 0; i < n; ++i) {
        const auto g = nnet::Tensor<float>::vector(grad[i].cast<float>());
        auto proj = nnet::backward(encoder.projection, proj_traces[i], g);
        nnet::accumulate(proj_grads, proj.params);
        auto trunk = nnet::backward(encoder.trunk, trunk_traces[i], proj.input_grad);
        nnet::accumulate(trunk_grads, trunk.params);
      }
      nnet::sgd_step(encoder.projection, proj_grads, static_cast<float>(cfg.lr));
      nnet::sgd_step(encoder.trunk, trunk_grads, static_cast<float>(cfg.lr));
    }
    losses.push_back(total / steps);
    check_loss(losses.back(), stage, epoch + 1);
    emit(log, epoch_line(stage, epoch + 1, losses.back()));
  }
  return losses;
}

std::vector<double> train_emotion_head(Encoder& encoder,
                                       const std::vector<const nnet::Tensor<float>*>& inputs,
                                       const std::vector<int>& labels, const TrainConfig& cfg,
                                       std::uint64_t seed, const Log& log) {
  if (!encoder.emotion_head) throw ModelError("encoder has no emotion head");
  nnet::Model<float>& head = *encoder.emotion_head;
  if (!cfg.freeze_trunk) {
    // Joint fine-tuning: stack trunk and head gradients per sample.
    if (inputs.size() != labels.size() || inputs.empty()) {
      throw InvalidArgument("train_emotion_head: need matching, nonempty inputs and labels");
    }
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::vector<double> losses;
    for (int epoch = 0; epoch < cfg.emotion_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      double total = 0.0;
      for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
        const std::size_t end = std::min(order.size(), b + cfg.batch_size);
        const float scale = 1.0f / static_cast<float>(end - b);
        FloatGrads head_grads, trunk_grads;
        for (std::size_t k = b; k < end; ++k) {
          const auto tt = nnet::forward(encoder.trunk, *inputs[order[k]]);
          const auto ht = nnet::forward_logits(head, tt.output());
          check_logits(ht.output(), head.tag(), epoch + 1);
          const auto loss = nnet::softmax_cross_entropy(ht.output(), labels[order[k]]);
          total += loss.loss;
          auto hb = nnet::backward(head, ht, loss.grad);
          nnet::accumulate(head_grads, hb.params, scale);
          nnet::accumulate(trunk_grads, nnet::backward(encoder.trunk, tt, hb.input_grad).params, scale);
        }
        nnet::sgd_step(head, head_grads, static_cast<float>(cfg.lr));
        nnet::sgd_step(encoder.trunk, trunk_grads, static_cast<float>(cfg.lr));
      }
      losses.push_back(total / static_cast<double>(order.size()));
      check_loss(losses.back(), head.tag(), epoch + 1);
      emit(log, epoch_line(head.tag(), epoch + 1, losses.back()));
    }
    return losses;
  }
  std::vector<nnet::Tensor<float>> features;
  features.reserve(inputs.size());
  for (const auto* x : inputs) features.push_back(nnet::infer(encoder.trunk, *x));
  std::vector<const nnet::Tensor<float>*> ptrs;
  for (const auto& f : features) ptrs.push_back(&f);
  Log sparse;
  if (log) {
    // Only a handful of lines: the head trains for many cheap epochs.
    sparse = [&, count = 0](const std::string& line) mutable {
      ++count;
      if (count <= 3 || count % 25 == 0 || count == cfg.emotion_epochs) log(line);
    };
  }
  return train_classifier(head, ptrs, labels, cfg.emotion_epochs, cfg.lr, cfg.batch_size, seed, sparse);
}

TrainResult train_cascade(const Dataset& data, const TrainConfig& cfg, const PipelineConfig& pcfg,
                          const Log& log) {
  TrainResult result;
  result.bundle = make_bundle(pcfg, cfg.embedding_dim, cfg.seed, cfg.per_gender);
  CascadeBundle& b = result.bundle;

  std::vector<const nnet::Tensor<float>*> vad_x, gender_x;
  std::vector<int> vad_y, gender_y;
  for (const auto& s : data.samples) {
    if (s.is_test) continue;
    vad_x.push_back(&s.input);
    vad_y.push_back(s.is_speech ? 1 : 0);
    if (s.is_speech) {
      gender_x.push_back(&s.input);
      gender_y.push_back(*s.gender == Gender::kMale ? 0 : 1);
    }
  }
  if (std::set<int>(vad_y.begin(), vad_y.end()).size() < 2) {
    throw InvalidArgument("training split needs both speech and noise windows");
  }
  if (std::set<int>(gender_y.begin(), gender_y.end()).size() < 2) {
    throw InvalidArgument("training split needs both genders");
  }
  emit(log, "stage vad: " + std::to_string(vad_x.size()) + " windows");
  result.logs.push_back({"vad", train_classifier(b.vad, vad_x, vad_y, cfg.classifier_epochs, cfg.lr,
                                                 cfg.batch_size, mix_seed(cfg.seed, 101), log)});
  emit(log, "stage gender: " + std::to_string(gender_x.size()) + " windows");
  result.logs.push_back({"gender", train_classifier(b.gender, gender_x, gender_y, cfg.classifier_epochs,
                                                    cfg.lr, cfg.batch_size, mix_seed(cfg.seed, 102), log)});

  auto route_samples = [&](std::optional<Gender> route) {
    std::vector<const Sample*> out;
    for (const auto& s : data.samples) {
      if (!s.is_test && s.is_speech && (!route || s.gender == route)) out.push_back(&s);
    }
    return out;
  };
  auto train_route = [&](Encoder& enc, std::optional<Gender> route, const std::string& name,
                         std::uint64_t stream) {
    const auto samples = route_samples(route);
    std::vector<const nnet::Tensor<float>*> x;
    std::vector<int> spk, emo;
    for (const auto* s : samples) {
      x.push_back(&s->input);
      spk.push_back(s->speaker);
      emo.push_back(static_cast<int>(s->emotion.value_or(Emotion::kNeutrality)));
    }
    auto enc_x = x;
    auto enc_spk = spk;
    for (const auto& s : data.edge_samples) {
      if (!s.is_test && (!route || s.gender == route)) {
        enc_x.push_back(&s.input);
        enc_spk.push_back(s.speaker);
      }
    }
    emit(log, "stage encoder_" + name + ": " + std::to_string(enc_x.size()) + " windows");
    result.logs.push_back({"encoder_" + name,
                           train_encoder(enc, enc_x, enc_spk, cfg, mix_seed(cfg.seed, stream), log)});
    if (cfg.freeze_trunk) enc.trunk.freeze_all();
    emit(log, "stage emotion_" + name);
    result.logs.push_back({"emotion_" + name,
                           train_emotion_head(enc, x, emo, cfg, mix_seed(cfg.seed, stream + 1), log)});
    enc.trunk.unfreeze_all();
  };
  if (b.shared) {
    train_route(*b.shared, std::nullopt, "shared", 200);
  } else {
    train_route(*b.male, Gender::kMale, "male", 300);
    train_route(*b.female, Gender::kFemale, "female", 400);
  }
  return result;
}

double reid_accuracy(const std::vector<UtteranceEmbedding>& enroll,
                     const std::vector<UtteranceEmbedding>& test) {
  if (test.empty()) throw InvalidArgument("reid_accuracy: empty test split");
  std::map<std::pair<int, int>, std::vector<Eigen::VectorXd>> pools;
  for (const auto& u : enroll) {
    auto& pool = pools[{static_cast<int>(u.route), u.speaker}];
    pool.insert(pool.end(), u.windows.begin(), u.windows.end());
  }
  std::map<std::pair<int, int>, Eigen::VectorXd> centroids;
  for (const auto& [key, pool] : pools) {
    if (!pool.empty()) centroids[key] = centroid(pool);
  }
  int correct = 0;
  for (const auto& u : test) {
    if (u.windows.empty()) continue;
    const Eigen::VectorXd e = centroid(u.windows);
    int best = -1;
    double best_d = 3.0;
    for (const auto& [key, c] : centroids) {
      if (key.first != static_cast<int>(u.route)) continue;
      const double d = cosine_distance(e, c);
      if (d < best_d) {
        best_d = d;
        best = key.second;
      }
    }
    if (best == u.speaker) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

EvalReport evaluate(const Dataset& data, const CascadeBundle& bundle, const PipelineConfig& cfg,
                    const EvalOptions& opts) {
  EvalReport r;
  int vad_total = 0, vad_ok = 0, gender_total = 0, gender_ok = 0, emo_total = 0, emo_ok = 0;

  // Per-file window lists, in manifest order.
  std::map<int, std::vector<const Sample*>> by_file;
  for (const auto& s : data.samples) by_file[s.file_index].push_back(&s);

  std::vector<UtteranceEmbedding> enroll, test;
  std::map<int, std::vector<Eigen::VectorXd>> route_emb;
  std::map<int, std::vector<int>> route_lbl;
  for (const auto& [file, samples] : by_file) {
    const auto& entry = data.manifest.entries[file];
    if (entry.is_test) {
      for (const auto* s : samples) {
        ++vad_total;
        const bool speech = energy_gate(s->window, cfg.gate_dbfs) == GateDecision::kCandidate &&
                            classify_vad(s->window, bundle.vad, cfg.norm).label == 1;
        if (speech == s->is_speech) ++vad_ok;
      }
    }
    if (!entry.is_speech) continue;
    // Route the whole utterance by majority gender vote over its windows.
    int male_votes = 0;
    for (const auto* s : samples) {
      FrameAnnotation a;
      a.window = s->window;
      a.vad = VadLabel::kSpeech;
      const int label = classify_gender(a, bundle.gender, cfg.norm).label;
      male_votes += label == 0 ? 1 : 0;
      if (entry.is_test) {
        ++gender_total;
        if ((label == 0) == (*entry.gender == Gender::kMale)) ++gender_ok;
      }
    }
    const Gender route = 2 * male_votes >= static_cast<int>(samples.size()) ? Gender::kMale : Gender::kFemale;
    const Encoder& enc = bundle.encoder_for(route);
    UtteranceEmbedding u;
    u.speaker = *entry.speaker_id;
    u.route = route;
    for (const auto* s : samples) {
      const auto pooled = nnet::infer(enc.trunk, s->input);
      const Eigen::VectorXd e = nnet::infer(enc.projection, pooled).data().cast<double>().normalized();
      u.windows.push_back(e);
      if (entry.is_test) {
        route_emb[static_cast<int>(bundle.per_gender() ? route : Gender::kMale)].push_back(e);
        route_lbl[static_cast<int>(bundle.per_gender() ? route : Gender::kMale)].push_back(u.speaker);
        if (enc.emotion_head && entry.emotion) {
          const auto dist = emotion_from_features(pooled, *enc.emotion_head);
          double sum = 0;
          for (double p : dist.p) sum += p;
          r.emotion_max_sum_error = std::max(r.emotion_max_sum_error, std::abs(sum - 1.0));
          const auto pred = dist.argmax();
          ++r.emotion_confusion[static_cast<int>(*entry.emotion)][static_cast<int>(pred)];
          ++emo_total;
          if (pred == *entry.emotion) ++emo_ok;
        }
      }
    }
    (entry.is_test ? test : enroll).push_back(std::move(u));
  }
  if (test.empty()) throw InvalidArgument("evaluate: test split has no speech utterances");
  r.vad_accuracy = vad_total ? static_cast<double>(vad_ok) / vad_total : 0.0;
  r.gender_accuracy = gender_total ? static_cast<double>(gender_ok) / gender_total : 0.0;
  r.emotion_accuracy = emo_total ? static_cast<double>(emo_ok) / emo_total : 0.0;
  r.reid_accuracy = reid_accuracy(enroll, test);
  r.n_test_utterances = static_cast<int>(test.size());
  r.n_test_windows = vad_total;

  bool have_hist = false;
  for (const auto& [route, emb] : route_emb) {
    const auto& lbl = route_lbl[route];
    if (std::set<int>(lbl.begin(), lbl.end()).size() < 2) continue;
    const auto h = distance_histograms(emb, lbl, opts.histogram_bins);
    r.histograms = have_hist ? merge_histograms(r.histograms, h) : h;
    have_hist = true;
  }

  // Latency: test files back to back until the stream is long enough.
  std::vector<double> stream;
  const auto min_samples = static_cast<std::size_t>(opts.latency_min_audio_s * cfg.sample_rate_hz);
  while (stream.size() < min_samples) {
    const std::size_t before = stream.size();
    for (std::size_t f = 0; f < data.manifest.entries.size() && stream.size() < min_samples; ++f) {
      if (!data.manifest.entries[f].is_test) continue;
      const auto& a = data.audio[f].samples;
      stream.insert(stream.end(), a.data(), a.data() + a.size());
    }
    if (stream.size() == before) throw InvalidArgument("evaluate: test split has no audio");
  }
  AudioBuffer audio;
  audio.sample_rate_hz = cfg.sample_rate_hz;
  audio.samples = Eigen::Map<const Eigen::VectorXd>(stream.data(), static_cast<Eigen::Index>(stream.size()));
  const auto t0 = std::chrono::steady_clock::now();
  const auto annotations = process_stream(audio, bundle, cfg);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<double> lat;
  for (const auto& a : annotations) lat.push_back(a.latency_ms);
  std::sort(lat.begin(), lat.end());
  r.median_latency_ms = lat.size() % 2 ? lat[lat.size() / 2]
                                       : 0.5 * (lat[lat.size() / 2 - 1] + lat[lat.size() / 2]);
  r.mean_latency_ms = std::accumulate(lat.begin(), lat.end(), 0.0) / lat.size();
  r.max_latency_ms = lat.back();
  r.latency_audio_s = audio.duration_s();
  r.real_time_factor = elapsed / audio.duration_s();
  return r;
}

std::string format_eval_table(const EvalReport& r) {
  char buf[1024];
  std::snprintf(buf, sizeof(buf),
                "metric                      value\n"
                "vad_accuracy                %.4f\n"
                "gender_accuracy             %.4f\n"
                "reid_accuracy               %.4f\n"
                "emotion_proxy_accuracy      %.4f\n"
                "mean_intra_distance         %.4f\n"
                "mean_inter_distance         %.4f\n"
                "histogram_overlap           %.4f\n"
                "median_window_latency_ms    %.3f\n"
                "mean_window_latency_ms      %.3f\n"
                "max_window_latency_ms       %.3f\n"
                "real_time_factor            %.5f\n"
                "latency_audio_s             %.1f\n"
                "test_utterances             %d\n",
                r.vad_accuracy, r.gender_accuracy, r.reid_accuracy, r.emotion_accuracy,
                r.histograms.mean_intra, r.histograms.mean_inter, r.histograms.overlap_coefficient(),
                r.median_latency_ms, r.mean_latency_ms, r.max_latency_ms, r.real_time_factor,
                r.latency_audio_s, r.n_test_utterances);
  return buf;
}

std::string format_eval_csv(const EvalReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "metric,value\n"
     << "vad_accuracy," << r.vad_accuracy << '\n'
     << "gender_accuracy," << r.gender_accuracy << '\n'
     << "reid_accuracy," << r.reid_accuracy << '\n'
     << "emotion_proxy_accuracy," << r.emotion_accuracy << '\n'
     << "mean_intra_distance," << r.histograms.mean_intra << '\n'
     << "mean_inter_distance," << r.histograms.mean_inter << '\n'
     << "histogram_overlap," << r.histograms.overlap_coefficient() << '\n'
     << "median_window_latency_ms," << r.median_latency_ms << '\n'
     << "mean_window_latency_ms," << r.mean_latency_ms << '\n'
     << "real_time_factor," << r.real_time_factor << '\n'
     << "latency_audio_s," << r.latency_audio_s << '\n'
     << "test_utterances," << r.n_test_utterances << '\n'
     << "emotion_max_sum_error," << r.emotion_max_sum_error << '\n';
  return os.str();
}

std::string format_confusion_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "true\\predicted";
  for (auto name : kEmotionNames) os << ',' << name;
  os << '\n';
  for (int i = 0; i < kNumEmotions; ++i) {
    os << kEmotionNames[i];
    for (int j = 0; j < kNumEmotions; ++j) os << ',' << r.emotion_confusion[i][j];
    os << '\n';
  }
  return os.str();
}

}  // namespace voxdesk::train
