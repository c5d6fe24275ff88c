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
#include <numeric>
#include <random>

#include "gtest/gtest.h"

namespace voxdesk {
namespace {

Eigen::VectorXd RandomUnit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(dim);
  for (auto& x : v) x = g(rng);
  return v.normalized();
}

Eigen::VectorXd Basis(int dim, int k) { return Eigen::VectorXd::Unit(dim, k); }

TEST(CosineDistanceTest, Examples) {
  const Eigen::VectorXd a = Basis(4, 0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, Basis(4, 1)), 1.0);
  EXPECT_DOUBLE_EQ(cosine_distance(a, Eigen::VectorXd(-a)), 2.0);
  EXPECT_THROW(cosine_distance(a, Basis(3, 0)), InvalidArgument);
}

TEST(CosineDistanceTest, SymmetricAndBounded) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto a = RandomUnit(rng, 8), b = RandomUnit(rng, 8);
    const double d = cosine_distance(a, b);
    EXPECT_DOUBLE_EQ(d, cosine_distance(b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0);
  }
}

TEST(CentroidTest, Examples) {
  const Eigen::VectorXd v = Eigen::Vector3d(0.6, 0.0, 0.8);
  EXPECT_TRUE(centroid({v}).isApprox(v, 1e-15));
  const auto c = centroid({Basis(2, 0), Basis(2, 1)});
  EXPECT_NEAR(c[0], 0.70711, 1e-5);
  EXPECT_NEAR(c[1], 0.70711, 1e-5);
  EXPECT_THROW(centroid({v, Eigen::VectorXd(-v)}), DegenerateError);
  EXPECT_THROW(centroid({}), InvalidArgument);
}

TEST(AssignTest, EmptyRegistryIsNew) {
  SpeakerRegistry reg;
  const auto a = reg.assign(Basis(4, 0));
  EXPECT_TRUE(a.is_new());
  EXPECT_TRUE(a.probabilities.empty());
  EXPECT_EQ(a.nearest_id, -1);
}

TEST(AssignTest, EquidistantIsHalfAndLowestIdWins) {
  SpeakerRegistry reg;
  reg.enroll_or_update(Basis(3, 0), std::nullopt);
  reg.enroll_or_update(Basis(3, 1), std::nullopt);
  const Eigen::VectorXd e = (Basis(3, 0) + Basis(3, 1)).normalized();
  const auto a = reg.assign(e);
  ASSERT_EQ(a.probabilities.size(), 2u);
  EXPECT_NEAR(a.probabilities[0], 0.5, 1e-12);
  EXPECT_NEAR(a.probabilities[1], 0.5, 1e-12);
  EXPECT_EQ(a.speaker_id, 0);
}

TEST(AssignTest, TemperatureExample) {
  SpeakerRegistry reg(0.1, 0.6);
  const int id_a = reg.enroll_or_update(Eigen::Vector3d(0.9, std::sqrt(1 - 0.81), 0.0), std::nullopt);
  const int id_b = reg.enroll_or_update(Eigen::Vector3d(0.5, 0.0, std::sqrt(0.75)), std::nullopt);
  const auto a = reg.assign(Eigen::Vector3d(1.0, 0.0, 0.0));
  EXPECT_EQ(a.speaker_id, id_a);
  EXPECT_NEAR(a.min_distance, 0.1, 1e-12);
  // exp(-1) / (exp(-1) + exp(-5))
  EXPECT_NEAR(a.probability_of(id_a), 0.98201, 5e-6);
  EXPECT_NEAR(a.probability_of(id_b), 1.0 - 0.98201, 5e-6);
}

TEST(AssignTest, FarEmbeddingIsNewButKeepsProbabilities) {
  SpeakerRegistry reg(0.1, 0.6);
  reg.enroll_or_update(Basis(3, 0), std::nullopt);
  const auto a = reg.assign(Basis(3, 1));
  EXPECT_TRUE(a.is_new());
  EXPECT_EQ(a.nearest_id, 0);
  EXPECT_NEAR(a.probabilities[0], 1.0, 1e-15);
}

TEST(AssignTest, ProbabilitiesSumToOneAndWinnerIsTauInvariant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::VectorXd> centers;
    for (int k = 0; k < 5; ++k) centers.push_back(RandomUnit(rng, 6));
    const auto e = RandomUnit(rng, 6);
    std::optional<int> winner;
    int nearest = -1;
    for (double tau : {0.01, 0.1, 1.0, 10.0}) {
      SpeakerRegistry reg(tau, 1.99);
      for (const auto& c : centers) reg.enroll_or_update(c, std::nullopt);
      const auto a = reg.assign(e);
      const double sum = std::accumulate(a.probabilities.begin(), a.probabilities.end(), 0.0);
      EXPECT_NEAR(sum, 1.0, 1e-12);
      if (nearest < 0) {
        winner = a.speaker_id;
        nearest = a.nearest_id;
      }
      EXPECT_EQ(a.speaker_id, winner);
      EXPECT_EQ(a.nearest_id, nearest);
      // The most probable id is the nearest one.
      const auto top = std::max_element(a.probabilities.begin(), a.probabilities.end());
      EXPECT_EQ(a.ids[top - a.probabilities.begin()], nearest);
    }
  }
}

TEST(AssignTest, SymmetricUnderRelabeling) {
  // Swapping enrollment order swaps ids but not the chosen centroid.
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c0 = RandomUnit(rng, 5), c1 = RandomUnit(rng, 5), e = RandomUnit(rng, 5);
    SpeakerRegistry fwd(0.1, 1.99), rev(0.1, 1.99);
    fwd.enroll_or_update(c0, std::nullopt);
    fwd.enroll_or_update(c1, std::nullopt);
    rev.enroll_or_update(c1, std::nullopt);
    rev.enroll_or_update(c0, std::nullopt);
    const auto a = fwd.assign(e), b = rev.assign(e);
    EXPECT_NEAR(a.probabilities[0], b.probabilities[1], 1e-12);
    EXPECT_NEAR(a.probabilities[1], b.probabilities[0], 1e-12);
    EXPECT_EQ(fwd.profile(*a.speaker_id).centroid, rev.profile(*b.speaker_id).centroid);
  }
}

TEST(EnrollTest, NewAndUpdate) {
  SpeakerRegistry reg;
  const Eigen::VectorXd c = Basis(3, 0), e = Basis(3, 1), other = Basis(3, 2);
  const int id = reg.enroll_or_update(c, std::nullopt, Gender::kFemale);
  const int id2 = reg.enroll_or_update(other, std::nullopt);
  EXPECT_EQ(id, 0);
  EXPECT_EQ(id2, 1);
  EXPECT_EQ(reg.size(), 2u);
  EXPECT_EQ(reg.profile(id).centroid, c);
  EXPECT_EQ(reg.profile(id).gender, Gender::kFemale);
  reg.enroll_or_update(e, id);
  EXPECT_EQ(reg.profile(id).n_samples, 2);
  EXPECT_TRUE(reg.profile(id).centroid.isApprox(((c + e) / 2).normalized(), 1e-15));
  EXPECT_EQ(reg.profile(id2).centroid, other);
  EXPECT_EQ(reg.profile(id2).n_samples, 1);
  EXPECT_THROW(reg.enroll_or_update(e, 7), InvalidArgument);
  EXPECT_THROW(reg.enroll_or_update(Basis(4, 0), std::nullopt), InvalidArgument);
}

TEST(EnrollTest, RunningMeanEqualsBatchMeanInAnyOrder) {
  std::mt19937_64 rng(12);
  std::vector<Eigen::VectorXd> samples;
  const auto base = RandomUnit(rng, 16);
  for (int i = 0; i < 40; ++i) samples.push_back((base + 0.3 * RandomUnit(rng, 16)).normalized());
  const Eigen::VectorXd batch = centroid(samples);
  for (int perm = 0; perm < 5; ++perm) {
    std::shuffle(samples.begin(), samples.end(), rng);
    SpeakerRegistry reg;
    const int id = reg.enroll_or_update(samples[0], std::nullopt);
    for (std::size_t i = 1; i < samples.size(); ++i) reg.enroll_or_update(samples[i], id);
    EXPECT_LT((reg.profile(id).centroid - batch).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(reg.profile(id).centroid.norm(), 1.0, 1e-12);
  }
}

TEST(SegmentsTest, Examples) {
  const auto segs = build_segments({{0.0, 0, 0.9}, {0.5, 0, 0.8}, {1.0, 0, 0.7}, {1.5, 1, 0.6}, {2.0, 1, 0.4}}, 0.5);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].speaker_id, 0);
  EXPECT_DOUBLE_EQ(segs[0].start_s, 0.0);
  EXPECT_DOUBLE_EQ(segs[0].end_s, 1.5);
  EXPECT_NEAR(segs[0].mean_confidence, 0.8, 1e-12);
  EXPECT_EQ(segs[1].speaker_id, 1);
  EXPECT_DOUBLE_EQ(segs[1].start_s, 1.5);
  EXPECT_DOUBLE_EQ(segs[1].end_s, 2.5);
  EXPECT_NEAR(segs[1].mean_confidence, 0.5, 1e-12);

  EXPECT_TRUE(build_segments({{0.0, std::nullopt, 0}, {0.5, std::nullopt, 0}}, 0.5).empty());
  EXPECT_TRUE(build_segments({}, 0.5).empty());
  const auto one = build_segments({{1.0, 3, 1.0}}, 0.5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0].start_s, 1.0);
  EXPECT_DOUBLE_EQ(one[0].end_s, 1.5);
}

TEST(SegmentsTest, NoiseSplitsSameSpeaker) {
  const auto segs = build_segments({{0.0, 0, 1}, {0.5, std::nullopt, 0}, {1.0, 0, 1}}, 0.5);
  EXPECT_EQ(segs.size(), 2u);
}

TEST(SegmentsTest, CoverageIdentityOnRandomLabels) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabeledWindow> w;
    int speech = 0;
    const int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      const int r = static_cast<int>(rng() % 4);
      std::optional<int> id;
      if (r < 3) {
        id = r;
        ++speech;
      }
      w.push_back({0.5 * i, id, 0.5});
    }
    const auto segs = build_segments(w, 0.5);
    double covered = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_LT(segs[i].start_s, segs[i].end_s);
      if (i > 0) {
        EXPECT_LE(segs[i - 1].end_s, segs[i].start_s + 1e-12);
      }
      covered += segs[i].duration_s();
    }
    EXPECT_NEAR(covered, 0.5 * speech, 1e-9);
  }
}

TEST(SphericalPcaTest, BasisVectorsMapToSignedBasis) {
  const int dim = 32;
  const std::vector<Eigen::VectorXd> in = {Basis(dim, 0), Basis(dim, 1), Basis(dim, 2)};
  const auto out = spherical_pca_3d(in);
  ASSERT_EQ(out.size(), 3u);
  Eigen::Matrix3d gram;
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(out[i].norm(), 1.0, 1e-6);
    // Each output is a signed standard basis vector of R^3.
    EXPECT_NEAR(out[i].cwiseAbs().maxCoeff(), 1.0, 1e-9);
    for (int j = 0; j < 3; ++j) gram(i, j) = out[i].dot(out[j]);
  }
  EXPECT_TRUE(gram.isApprox(Eigen::Matrix3d::Identity(), 1e-9));
}

TEST(SphericalPcaTest, UnitNormDeterministicAndDuplicates) {
  std::mt19937_64 rng(4);
  std::vector<Eigen::VectorXd> in;
  for (int i = 0; i < 30; ++i) in.push_back(RandomUnit(rng, 32));
  const auto a = spherical_pca_3d(in);
  for (const auto& p : a) EXPECT_NEAR(p.norm(), 1.0, 1e-6);
  auto doubled = in;
  doubled.insert(doubled.end(), in.begin(), in.end());
  const auto b = spherical_pca_3d(doubled);
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_TRUE(b[i].isApprox(a[i], 1e-9));
    EXPECT_TRUE(b[i + in.size()].isApprox(a[i], 1e-9));
  }
}

TEST(SphericalPcaTest, RankDeficientThrows) {
  const std::vector<Eigen::VectorXd> in = {Basis(8, 0), Basis(8, 1), (Basis(8, 0) + Basis(8, 1)).normalized()};
  EXPECT_THROW(spherical_pca_3d(in), DegenerateError);
  EXPECT_THROW(spherical_pca_3d({Basis(8, 0), Basis(8, 1)}), DegenerateError);
}

TEST(HistogramTest, ConstructedExample) {
  const std::vector<Eigen::VectorXd> e = {Basis(4, 0), Basis(4, 0), Basis(4, 1), Basis(4, 1)};
  const auto h = distance_histograms(e, {0, 0, 1, 1}, 40);
  EXPECT_EQ(h.intra[0], 2u);
  EXPECT_EQ(h.inter[20], 4u);
  EXPECT_EQ(h.total_pairs(), 6u);
  EXPECT_DOUBLE_EQ(h.mean_intra, 0.0);
  EXPECT_DOUBLE_EQ(h.mean_inter, 1.0);
  EXPECT_DOUBLE_EQ(h.overlap_coefficient(), 0.0);
}

TEST(HistogramTest, PairCountAndAntipodalBin) {
  std::mt19937_64 rng(6);
  std::vector<Eigen::VectorXd> e;
  std::vector<int> labels;
  for (int i = 0; i < 23; ++i) {
    e.push_back(RandomUnit(rng, 8));
    labels.push_back(i % 4);
  }
  const auto h = distance_histograms(e, labels, 17);
  EXPECT_EQ(h.total_pairs(), 23u * 22u / 2u);
  const auto anti = distance_histograms({Basis(2, 0), Eigen::VectorXd(-Basis(2, 0))}, {0, 1}, 10);
  EXPECT_EQ(anti.inter[9], 1u);
  EXPECT_THROW(distance_histograms(e, std::vector<int>(23, 0), 10), InvalidArgument);
}

TEST(HistogramTest, MergeWeightsMeansByPairs) {
  const std::vector<Eigen::VectorXd> e = {Basis(4, 0), Basis(4, 0), Basis(4, 1)};
  const auto a = distance_histograms(e, {0, 0, 1}, 10);
  const auto b = distance_histograms({Basis(4, 0), Basis(4, 1)}, {0, 1}, 10);
  const auto m = merge_histograms(a, b);
  EXPECT_EQ(m.total_pairs(), a.total_pairs() + b.total_pairs());
  EXPECT_DOUBLE_EQ(m.mean_inter, 1.0);
  EXPECT_DOUBLE_EQ(m.mean_intra, 0.0);
}

}  // namespace
}  // namespace voxdesk
