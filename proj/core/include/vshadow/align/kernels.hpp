// Copyright (c) 2026 vshadow authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VSHADOW_ALIGN_KERNELS_HPP_
#define VSHADOW_ALIGN_KERNELS_HPP_

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "vshadow/data/feature_sequence.hpp"

namespace vshadow::align {

enum class ScoreSemantics { kCost, kLogLikelihood };

/// Alignment lattice over (source frame, target frame) pairs.
struct ScoreMatrix {
  Eigen::MatrixXd values;  // source frames x target frames
  ScoreSemantics semantics = ScoreSemantics::kCost;

  int SourceFrames() const { return static_cast<int>(values.rows()); }
  int TargetFrames() const { return static_cast<int>(values.cols()); }
  void Validate() const;
};

/// Monotonic index-pair sequence from (0,0) to (T_src-1, T_tgt-1).
struct AlignmentPath {
  std::vector<std::pair<int, int>> steps;
  double total_score = 0.0;
};

enum class FrameMetric { kCosine, kEuclidean };

std::string FrameMetricName(FrameMetric metric);
FrameMetric FrameMetricFromName(const std::string& name);

/// Cosine distance 1 - cos(p,q) in [0,2], or the L2 norm of p - q.
/// Zero-vector convention for cosine: both zero -> distance 0; exactly one
/// zero -> distance 1 (similarity treated as 0).
double FrameDistance(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                     FrameMetric metric);

/// Pairwise frame distances between two equal-dim sequences.
Eigen::MatrixXd PairwiseDistance(const data::FeatureSequence& a,
                                 const data::FeatureSequence& b,
                                 FrameMetric metric);

/// Minimum-cost monotonic path with moves {diagonal, vertical, horizontal}.
/// Requires cost semantics and nonnegative values. Tie-break prefers
/// diagonal, then vertical (source advance), then horizontal.
AlignmentPath Dtw(const ScoreMatrix& cost);

AlignmentPath DtwAlignFeatures(const data::FeatureSequence& a,
                               const data::FeatureSequence& b,
                               FrameMetric metric);

/// Monotonic alignment search. Over alignments a_0..a_{T_tgt-1} with
/// a_0 = 0, a_{T_tgt-1} = T_src-1 and a_{j+1} in {a_j, a_j+1}, maximizes
/// sum_j loglik[a_j, j] via Q[i,j] = loglik[i,j] + max(Q[i,j-1], Q[i-1,j-1]).
/// Requires T_tgt >= T_src. Tie-break prefers staying on the same source
/// frame. The returned path has one step (a_j, j) per target frame.
AlignmentPath Mas(const ScoreMatrix& loglik);

/// Target frames assigned to each source frame by a MAS path. Every entry
/// is >= 1 and the entries sum to T_tgt.
std::vector<int> MasDurations(const AlignmentPath& path,
                              int num_source_frames);

/// Differentiable alignment loss: -alpha[T_src-1, T_tgt-1] / T_tgt, where
/// alpha follows the MAS recursion with log-sum-exp in place of max and the
/// input is column log-softmax normalized over the source axis first. The
/// normalization is applied internally, so callers may pass raw scores.
double ForwardSum(const ScoreMatrix& loglik);

/// Same loss; also writes d loss / d loglik (including the internal
/// log-softmax) into *grad.
double ForwardSumWithGrad(const ScoreMatrix& loglik, Eigen::MatrixXd* grad);

/// Per-step distances along the DTW path between a first-shadowing take and
/// the script-shadowing reference, with flags where distance > threshold.
struct DisfluencyProfile {
  AlignmentPath path;
  Eigen::VectorXd per_step_distance;
  std::vector<bool> segment_flags;
  double threshold = 0.0;
};

DisfluencyProfile ComputeDisfluencyProfile(const data::FeatureSequence& s1,
                                           const data::FeatureSequence& ss,
                                           FrameMetric metric,
                                           double threshold);

/// Default flag threshold: mean + 2 * stddev (population) of the pooled
/// per-step distances, normally collected over the dev split.
double CalibrateThreshold(const std::vector<Eigen::VectorXd>& distances);

}  // namespace vshadow::align

#endif  // VSHADOW_ALIGN_KERNELS_HPP_
