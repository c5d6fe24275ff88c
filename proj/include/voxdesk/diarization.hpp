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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "voxdesk/errors.hpp"
#include "voxdesk/labels.hpp"

namespace voxdesk {

/// d = 1 - a.b for unit vectors, clamped to [0, 2].
template <typename DerivedA, typename DerivedB>
double cosine_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("cosine_distance: dimension mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  const double d = 1.0 - static_cast<double>(a.dot(b));
  return std::clamp(d, 0.0, 2.0);
}

/// Normalized mean ("center of mass") of a set of embeddings.
Eigen::VectorXd centroid(const std::vector<Eigen::VectorXd>& embeddings);

struct SpeakerProfile {
  int speaker_id = 0;
  Eigen::VectorXd centroid;
  Eigen::VectorXd mean;  // unnormalized running mean; centroid = mean.normalized()
  int n_samples = 0;
  std::optional<Gender> gender;
};

struct Assignment {
  std::optional<int> speaker_id;  // nullopt means NEW
  int nearest_id = -1;            // -1 when the registry is empty
  double min_distance = 0.0;
  std::vector<int> ids;
  std::vector<double> probabilities;  // aligned with ids

  bool is_new() const { return !speaker_id.has_value(); }
  double probability_of(int id) const;
};

/// Enrolled speakers with softmax-of-negative-distance assignment.
class SpeakerRegistry {
 public:
  explicit SpeakerRegistry(double tau = 0.1, double d_new = 0.6, int first_id = 0);

  Assignment assign(const Eigen::VectorXd& e) const;
  /// NEW enrolls a fresh profile; otherwise folds e into the chosen profile's running mean.
  int enroll_or_update(const Eigen::VectorXd& e, const std::optional<int>& decision,
                       std::optional<Gender> gender = std::nullopt);

  const std::vector<SpeakerProfile>& profiles() const { return profiles_; }
  const SpeakerProfile& profile(int speaker_id) const;
  std::size_t size() const { return profiles_.size(); }
  double tau() const { return tau_; }
  double d_new() const { return d_new_; }
  int next_id() const { return next_id_; }

 private:
  double tau_;
  double d_new_;
  int next_id_;
  std::vector<SpeakerProfile> profiles_;
};

Assignment assign_speaker(const Eigen::VectorXd& e, const SpeakerRegistry& reg);
int enroll_or_update(const Eigen::VectorXd& e, const std::optional<int>& decision, SpeakerRegistry& reg);

struct LabeledWindow {
  double start_s = 0.0;
  std::optional<int> speaker_id;  // nullopt for noise windows
  double confidence = 0.0;
};

struct DiarizationSegment {
  int speaker_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  double mean_confidence = 0.0;

  double duration_s() const { return end_s - start_s; }
  friend bool operator==(const DiarizationSegment&, const DiarizationSegment&) = default;
};

/// Merges runs of same-speaker windows; each window spans [start, start + hop).
std::vector<DiarizationSegment> build_segments(const std::vector<LabeledWindow>& windows, double hop_s);

/// Projects onto the top three principal axes of the (uncentered) second-moment
/// matrix and re-normalizes each projection onto the unit sphere.
std::vector<Eigen::Vector3d> spherical_pca_3d(const std::vector<Eigen::VectorXd>& embeddings);

struct DistanceHistograms {
  std::vector<std::size_t> intra;
  std::vector<std::size_t> inter;
  double mean_intra = 0.0;
  double mean_inter = 0.0;

  std::size_t total_pairs() const;
  /// Sum over bins of min(normalized intra, normalized inter).
  double overlap_coefficient() const;
};

DistanceHistograms distance_histograms(const std::vector<Eigen::VectorXd>& embeddings,
                                       const std::vector<int>& labels, int n_bins);

/// Bin-wise sum of two histogram sets with pair-weighted means.
DistanceHistograms merge_histograms(const DistanceHistograms& a, const DistanceHistograms& b);

}  // namespace voxdesk
