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

#include "voxdesk/diarization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace voxdesk {

Eigen::VectorXd centroid(const std::vector<Eigen::VectorXd>& embeddings) {
  if (embeddings.empty()) throw InvalidArgument("centroid: empty embedding list");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(embeddings.front().size());
  for (const auto& e : embeddings) {
    if (e.size() != mean.size()) throw InvalidArgument("centroid: dimension mismatch");
    mean += e;
  }
  mean /= static_cast<double>(embeddings.size());
  const double norm = mean.norm();
  if (!(norm > 1e-12)) throw DegenerateError("centroid: embeddings cancel to a zero mean");
  return mean / norm;
}

double Assignment::probability_of(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return probabilities[i];
  }
  return 0.0;
}

SpeakerRegistry::SpeakerRegistry(double tau, double d_new, int first_id)
    : tau_(tau), d_new_(d_new), next_id_(first_id) {
  if (!(tau > 0.0)) throw InvalidArgument("registry: tau must be positive");
  if (!(d_new > 0.0 && d_new < 2.0)) throw InvalidArgument("registry: d_new must lie in (0, 2)");
}

Assignment SpeakerRegistry::assign(const Eigen::VectorXd& e) const {
  Assignment a;
  if (profiles_.empty()) return a;
  std::vector<double> d(profiles_.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    d[i] = cosine_distance(e, profiles_[i].centroid);
    // Profiles are kept in id order, so strict < keeps the lowest id on ties.
    if (d[i] < d[best]) best = i;
  }
  const double d_min = d[best];
  double z = 0.0;
  a.probabilities.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    a.probabilities[i] = std::exp(-(d[i] - d_min) / tau_);
    z += a.probabilities[i];
    a.ids.push_back(profiles_[i].speaker_id);
  }
  for (double& p : a.probabilities) p /= z;
  a.nearest_id = profiles_[best].speaker_id;
  a.min_distance = d_min;
  if (d_min <= d_new_) a.speaker_id = a.nearest_id;
  return a;
}

int SpeakerRegistry::enroll_or_update(const Eigen::VectorXd& e, const std::optional<int>& decision,
                                      std::optional<Gender> gender) {
  if (!profiles_.empty() && e.size() != profiles_.front().centroid.size()) {
    throw InvalidArgument("registry: embedding dimension mismatch");
  }
  if (!decision) {
    SpeakerProfile p;
    p.speaker_id = next_id_++;
    p.mean = e;
    p.centroid = e.normalized();
    p.n_samples = 1;
    p.gender = gender;
    profiles_.push_back(std::move(p));
    return profiles_.back().speaker_id;
  }
  auto it = std::find_if(profiles_.begin(), profiles_.end(),
                         [&](const SpeakerProfile& p) { return p.speaker_id == *decision; });
  if (it == profiles_.end()) {
    throw InvalidArgument("registry: unknown speaker id " + std::to_string(*decision));
  }
  it->n_samples += 1;
  it->mean += (e - it->mean) / static_cast<double>(it->n_samples);
  const double norm = it->mean.norm();
  if (!(norm > 1e-12)) throw DegenerateError("registry: speaker centroid collapsed to zero");
  it->centroid = it->mean / norm;
  return it->speaker_id;
}

const SpeakerProfile& SpeakerRegistry::profile(int speaker_id) const {
  for (const auto& p : profiles_) {
    if (p.speaker_id == speaker_id) return p;
  }
  throw InvalidArgument("registry: unknown speaker id " + std::to_string(speaker_id));
}

Assignment assign_speaker(const Eigen::VectorXd& e, const SpeakerRegistry& reg) { return reg.assign(e); }

int enroll_or_update(const Eigen::VectorXd& e, const std::optional<int>& decision, SpeakerRegistry& reg) {
  return reg.enroll_or_update(e, decision);
}

std::vector<DiarizationSegment> build_segments(const std::vector<LabeledWindow>& windows, double hop_s) {
  std::vector<DiarizationSegment> out;
  std::optional<DiarizationSegment> open;
  int merged = 0;
  auto close = [&] {
    if (open) {
      open->mean_confidence /= merged;
      out.push_back(*open);
      open.reset();
    }
  };
  for (const auto& w : windows) {
    if (!w.speaker_id) {
      close();
      continue;
    }
    const bool contiguous = open && std::abs(w.start_s - open->end_s) < 1e-9;
    if (open && open->speaker_id == *w.speaker_id && contiguous) {
      open->end_s = w.start_s + hop_s;
      open->mean_confidence += w.confidence;
      ++merged;
    } else {
      close();
      open = DiarizationSegment{*w.speaker_id, w.start_s, w.start_s + hop_s, w.confidence};
      merged = 1;
    }
  }
  close();
  return out;
}

std::vector<Eigen::Vector3d> spherical_pca_3d(const std::vector<Eigen::VectorXd>& embeddings) {
  if (embeddings.size() < 3) throw DegenerateError("spherical_pca_3d: need at least 3 embeddings");
  const Eigen::Index dim = embeddings.front().size();
  if (dim < 3) throw DegenerateError("spherical_pca_3d: embeddings have fewer than 3 dimensions");
  Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(embeddings.size()));
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].size() != dim) throw InvalidArgument("spherical_pca_3d: dimension mismatch");
    x.col(static_cast<Eigen::Index>(i)) = embeddings[i];
  }
  const Eigen::MatrixXd moment = x * x.transpose() / static_cast<double>(embeddings.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(moment);
  if (solver.info() != Eigen::Success) throw DegenerateError("spherical_pca_3d: eigen-decomposition failed");
  // Eigenvalues ascend; the last three columns are the principal axes.
  const Eigen::VectorXd& values = solver.eigenvalues();
  if (!(values[dim - 3] > 1e-10 * std::max(values[dim - 1], 1e-300))) {
    throw DegenerateError("spherical_pca_3d: embeddings span fewer than 3 dimensions");
  }
  Eigen::MatrixXd axes(dim, 3);
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(dim - 1 - k);
    // Sign convention: largest-magnitude component positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    axes.col(k) = v;
  }
  std::vector<Eigen::Vector3d> out;
  out.reserve(embeddings.size());
  for (const auto& e : embeddings) {
    const Eigen::Vector3d p = axes.transpose() * e;
    const double norm = p.norm();
    if (!(norm > 1e-12)) throw DegenerateError("spherical_pca_3d: embedding orthogonal to principal axes");
    out.push_back(p / norm);
  }
  return out;
}

std::size_t DistanceHistograms::total_pairs() const {
  std::size_t n = 0;
  for (auto c : intra) n += c;
  for (auto c : inter) n += c;
  return n;
}

double DistanceHistograms::overlap_coefficient() const {
  double n_intra = 0, n_inter = 0;
  for (auto c : intra) n_intra += static_cast<double>(c);
  for (auto c : inter) n_inter += static_cast<double>(c);
  if (n_intra == 0 || n_inter == 0) return 0.0;
  double overlap = 0.0;
  for (std::size_t b = 0; b < intra.size(); ++b) {
    overlap += std::min(intra[b] / n_intra, inter[b] / n_inter);
  }
  return overlap;
}

DistanceHistograms distance_histograms(const std::vector<Eigen::VectorXd>& embeddings,
                                       const std::vector<int>& labels, int n_bins) {
  if (embeddings.size() != labels.size()) throw InvalidArgument("distance_histograms: size mismatch");
  if (n_bins <= 0) throw InvalidArgument("distance_histograms: n_bins must be positive");
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    throw InvalidArgument("distance_histograms: need at least 2 distinct labels");
  }
  DistanceHistograms h;
  h.intra.assign(n_bins, 0);
  h.inter.assign(n_bins, 0);
  double sum_intra = 0, sum_inter = 0;
  std::size_t n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    for (std::size_t j = i + 1; j < embeddings.size(); ++j) {
      const double d = cosine_distance(embeddings[i], embeddings[j]);
      const int bin = std::min(n_bins - 1, static_cast<int>(d / 2.0 * n_bins));
      if (labels[i] == labels[j]) {
        ++h.intra[bin];
        sum_intra += d;
        ++n_intra;
      } else {
        ++h.inter[bin];
        sum_inter += d;
        ++n_inter;
      }
    }
  }
  h.mean_intra = n_intra ? sum_intra / n_intra : 0.0;
  h.mean_inter = n_inter ? sum_inter / n_inter : 0.0;
  return h;
}

DistanceHistograms merge_histograms(const DistanceHistograms& a, const DistanceHistograms& b) {
  if (a.intra.size() != b.intra.size()) throw InvalidArgument("merge_histograms: bin count mismatch");
  DistanceHistograms m = a;
  double na_intra = 0, nb_intra = 0, na_inter = 0, nb_inter = 0;
  for (std::size_t i = 0; i < a.intra.size(); ++i) {
    m.intra[i] += b.intra[i];
    m.inter[i] += b.inter[i];
    na_intra += a.intra[i];
    nb_intra += b.intra[i];
    na_inter += a.inter[i];
    nb_inter += b.inter[i];
  }
  m.mean_intra = (na_intra + nb_intra) > 0
                     ? (a.mean_intra * na_intra + b.mean_intra * nb_intra) / (na_intra + nb_intra)
                     : 0.0;
  m.mean_inter = (na_inter + nb_inter) > 0
                     ? (a.mean_inter * na_inter + b.mean_inter * nb_inter) / (na_inter + nb_inter)
                     : 0.0;
  return m;
}

}  // namespace voxdesk
