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

#include "vshadow/align/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "vshadow/common.hpp"

namespace vshadow::align {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Backpointer codes shared by the DP kernels.
enum Move : std::uint8_t { kNone = 0, kDiagonal, kVertical, kHorizontal };

void CheckAligned(const data::FeatureSequence& a,
                  const data::FeatureSequence& b) {
  if (a.Dim() != b.Dim()) {
    throw Error("feature dim mismatch: " + std::to_string(a.Dim()) + " vs " +
                std::to_string(b.Dim()));
  }
}

}  // namespace

void ScoreMatrix::Validate() const {
  if (values.rows() < 1 || values.cols() < 1) {
    throw Error("score matrix must have at least one row and column");
  }
  if (!values.allFinite()) {
    throw Error("score matrix contains non-finite values");
  }
}

std::string FrameMetricName(FrameMetric metric) {
  switch (metric) {
    case FrameMetric::kCosine:
      return "cosine";
    case FrameMetric::kEuclidean:
      return "euclidean";
  }
  throw Error("unknown frame metric");
}

FrameMetric FrameMetricFromName(const std::string& name) {
  if (name == "cosine") return FrameMetric::kCosine;
  if (name == "euclidean") return FrameMetric::kEuclidean;
  throw Error("unknown frame metric: " + name);
}

double FrameDistance(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                     FrameMetric metric) {
  if (p.size() != q.size()) {
    throw Error("frame dim mismatch: " + std::to_string(p.size()) + " vs " +
                std::to_string(q.size()));
  }
  if (metric == FrameMetric::kEuclidean) {
    return (p - q).norm();
  }
  const double np = p.norm();
  const double nq = q.norm();
  if (np == 0.0 && nq == 0.0) return 0.0;
  if (np == 0.0 || nq == 0.0) return 1.0;
  const double sim = p.dot(q) / (np * nq);
  return std::clamp(1.0 - sim, 0.0, 2.0);
}

Eigen::MatrixXd PairwiseDistance(const data::FeatureSequence& a,
                                 const data::FeatureSequence& b,
                                 FrameMetric metric) {
  CheckAligned(a, b);
  const Eigen::MatrixXd ad = a.data.cast<double>();
  const Eigen::MatrixXd bd = b.data.cast<double>();
  Eigen::MatrixXd out(a.Frames(), b.Frames());
  for (int i = 0; i < a.Frames(); ++i) {
    const Eigen::VectorXd pi = ad.row(i).transpose();
    for (int j = 0; j < b.Frames(); ++j) {
      out(i, j) = FrameDistance(pi, bd.row(j).transpose(), metric);
    }
  }
  return out;
}

AlignmentPath Dtw(const ScoreMatrix& cost) {
  cost.Validate();
  if (cost.semantics != ScoreSemantics::kCost) {
    throw Error("dtw requires cost semantics");
  }
  if (cost.values.minCoeff() < 0.0) {
    throw Error("dtw requires nonnegative costs");
  }
  const int rows = cost.SourceFrames();
  const int cols = cost.TargetFrames();
  Eigen::MatrixXd acc(rows, cols);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> back(rows, cols);

  acc(0, 0) = cost.values(0, 0);
  back(0, 0) = kNone;
  for (int i = 1; i < rows; ++i) {
    acc(i, 0) = acc(i - 1, 0) + cost.values(i, 0);
    back(i, 0) = kVertical;
  }
  for (int j = 1; j < cols; ++j) {
    acc(0, j) = acc(0, j - 1) + cost.values(0, j);
    back(0, j) = kHorizontal;
  }
  for (int i = 1; i < rows; ++i) {
    for (int j = 1; j < cols; ++j) {
      // Strict comparisons keep the earlier-preferred move on ties:
      // diagonal, then vertical, then horizontal.
      double best = acc(i - 1, j - 1);
      std::uint8_t move = kDiagonal;
      if (acc(i - 1, j) < best) {
        best = acc(i - 1, j);
        move = kVertical;
      }
      if (acc(i, j - 1) < best) {
        best = acc(i, j - 1);
        move = kHorizontal;
      }
      acc(i, j) = best + cost.values(i, j);
      back(i, j) = move;
    }
  }

  AlignmentPath path;
  path.total_score = acc(rows - 1, cols - 1);
  int i = rows - 1;
  int j = cols - 1;
  while (true) {
    path.steps.emplace_back(i, j);
    const std::uint8_t move = back(i, j);
    if (move == kNone) break;
    if (move == kDiagonal) {
      --i;
      --j;
    } else if (move == kVertical) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

AlignmentPath DtwAlignFeatures(const data::FeatureSequence& a,
                               const data::FeatureSequence& b,
                               FrameMetric metric) {
  ScoreMatrix cost;
  cost.values = PairwiseDistance(a, b, metric);
  cost.semantics = ScoreSemantics::kCost;
  return Dtw(cost);
}

AlignmentPath Mas(const ScoreMatrix& loglik) {
  loglik.Validate();
  if (loglik.semantics != ScoreSemantics::kLogLikelihood) {
    throw Error("mas requires log-likelihood semantics");
  }
  const int src = loglik.SourceFrames();
  const int tgt = loglik.TargetFrames();
  if (tgt < src) {
    throw Error("mas infeasible: target has " + std::to_string(tgt) +
                " frames but source has " + std::to_string(src));
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(src, tgt, kNegInf);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> back(src, tgt);
  back.setConstant(kNone);

  q(0, 0) = loglik.values(0, 0);
  for (int j = 1; j < tgt; ++j) {
    // a_j can advance at most one per step and must still reach src-1.
    const int lo = std::max(0, src - (tgt - j));
    const int hi = std::min(j, src - 1);
    for (int i = lo; i <= hi; ++i) {
      const double stay = q(i, j - 1);
      const double advance = i > 0 ? q(i - 1, j - 1) : kNegInf;
      if (stay == kNegInf && advance == kNegInf) continue;
      if (stay >= advance) {
        q(i, j) = loglik.values(i, j) + stay;
        back(i, j) = kHorizontal;
      } else {
        q(i, j) = loglik.values(i, j) + advance;
        back(i, j) = kDiagonal;
      }
    }
  }

  AlignmentPath path;
  path.total_score = q(src - 1, tgt - 1);
  path.steps.resize(tgt);
  int i = src - 1;
  for (int j = tgt - 1; j >= 0; --j) {
    path.steps[j] = {i, j};
    if (back(i, j) == kDiagonal) --i;
  }
  return path;
}

std::vector<int> MasDurations(const AlignmentPath& path,
                              int num_source_frames) {
  if (num_source_frames < 1) {
    throw Error("durations need at least one source frame");
  }
  std::vector<int> durations(num_source_frames, 0);
  for (const auto& [i, j] : path.steps) {
    if (i < 0 || i >= num_source_frames) {
      throw Error("path source index out of range: " + std::to_string(i));
    }
    ++durations[i];
  }
  for (int i = 0; i < num_source_frames; ++i) {
    if (durations[i] < 1) {
      throw Error("source frame " + std::to_string(i) +
                  " received no target frames");
    }
  }
  return durations;
}

namespace {

// Column log-softmax over the source axis; also returns per-column
// log-normalizers so the backward pass can recover the softmax weights.
Eigen::MatrixXd ColumnLogSoftmax(const Eigen::MatrixXd& raw) {
  Eigen::MatrixXd out(raw.rows(), raw.cols());
  for (int j = 0; j < raw.cols(); ++j) {
    const double m = raw.col(j).maxCoeff();
    const double lse = m + std::log((raw.col(j).array() - m).exp().sum());
    out.col(j) = raw.col(j).array() - lse;
  }
  return out;
}

Eigen::MatrixXd ForwardSumAlpha(const Eigen::MatrixXd& lognorm) {
  const int src = static_cast<int>(lognorm.rows());
  const int tgt = static_cast<int>(lognorm.cols());
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(src, tgt, kNegInf);
  alpha(0, 0) = lognorm(0, 0);
  for (int j = 1; j < tgt; ++j) {
    const int hi = std::min(j, src - 1);
    for (int i = 0; i <= hi; ++i) {
      const double stay = alpha(i, j - 1);
      const double advance = i > 0 ? alpha(i - 1, j - 1) : kNegInf;
      const double acc = LogSumExp2(stay, advance);
      if (acc == kNegInf) continue;
      alpha(i, j) = lognorm(i, j) + acc;
    }
  }
  return alpha;
}

}  // namespace

double ForwardSum(const ScoreMatrix& loglik) {
  loglik.Validate();
  if (loglik.semantics != ScoreSemantics::kLogLikelihood) {
    throw Error("forward_sum requires log-likelihood semantics");
  }
  const int src = loglik.SourceFrames();
  const int tgt = loglik.TargetFrames();
  if (tgt < src) {
    throw Error("forward_sum infeasible: target has " + std::to_string(tgt) +
                " frames but source has " + std::to_string(src));
  }
  const Eigen::MatrixXd lognorm = ColumnLogSoftmax(loglik.values);
  const Eigen::MatrixXd alpha = ForwardSumAlpha(lognorm);
  return -alpha(src - 1, tgt - 1) / static_cast<double>(tgt);
}

double ForwardSumWithGrad(const ScoreMatrix& loglik, Eigen::MatrixXd* grad) {
  loglik.Validate();
  if (loglik.semantics != ScoreSemantics::kLogLikelihood) {
    throw Error("forward_sum requires log-likelihood semantics");
  }
  const int src = loglik.SourceFrames();
  const int tgt = loglik.TargetFrames();
  if (tgt < src) {
    throw Error("forward_sum infeasible: target has " + std::to_string(tgt) +
                " frames but source has " + std::to_string(src));
  }
  const Eigen::MatrixXd lognorm = ColumnLogSoftmax(loglik.values);
  const Eigen::MatrixXd alpha = ForwardSumAlpha(lognorm);
  const double loss = -alpha(src - 1, tgt - 1) / static_cast<double>(tgt);

  // Reverse accumulation through the DP, then through the log-softmax.
  Eigen::MatrixXd galpha = Eigen::MatrixXd::Zero(src, tgt);
  Eigen::MatrixXd glognorm = Eigen::MatrixXd::Zero(src, tgt);
  galpha(src - 1, tgt - 1) = -1.0 / static_cast<double>(tgt);
  for (int j = tgt - 1; j >= 1; --j) {
    const int hi = std::min(j, src - 1);
    for (int i = 0; i <= hi; ++i) {
      const double g = galpha(i, j);
      if (g == 0.0 || alpha(i, j) == kNegInf) continue;
      glognorm(i, j) += g;
      const double stay = alpha(i, j - 1);
      const double advance = i > 0 ? alpha(i - 1, j - 1) : kNegInf;
      const double lse = LogSumExp2(stay, advance);
      if (stay != kNegInf) galpha(i, j - 1) += g * std::exp(stay - lse);
      if (advance != kNegInf) {
        galpha(i - 1, j - 1) += g * std::exp(advance - lse);
      }
    }
  }
  glognorm(0, 0) += galpha(0, 0);

  // d lognorm / d raw for a column softmax with probabilities p:
  // g_raw = g_ln - p * sum(g_ln).
  grad->resize(src, tgt);
  for (int j = 0; j < tgt; ++j) {
    const double colsum = glognorm.col(j).sum();
    grad->col(j) =
        glognorm.col(j).array() - lognorm.col(j).array().exp() * colsum;
  }
  return loss;
}

DisfluencyProfile ComputeDisfluencyProfile(const data::FeatureSequence& s1,
                                           const data::FeatureSequence& ss,
                                           FrameMetric metric,
                                           double threshold) {
  DisfluencyProfile profile;
  profile.threshold = threshold;
  profile.path = DtwAlignFeatures(s1, ss, metric);
  const Eigen::MatrixXd s1d = s1.data.cast<double>();
  const Eigen::MatrixXd ssd = ss.data.cast<double>();
  const int n = static_cast<int>(profile.path.steps.size());
  profile.per_step_distance.resize(n);
  profile.segment_flags.resize(n);
  for (int k = 0; k < n; ++k) {
    const auto& [i, j] = profile.path.steps[k];
    const double d = FrameDistance(s1d.row(i).transpose(),
                                   ssd.row(j).transpose(), metric);
    profile.per_step_distance[k] = d;
    profile.segment_flags[k] = d > threshold;
  }
  return profile;
}

double CalibrateThreshold(const std::vector<Eigen::VectorXd>& distances) {
  std::int64_t n = 0;
  double sum = 0.0;
  for (const auto& v : distances) {
    n += v.size();
    sum += v.sum();
  }
  if (n == 0) {
    throw Error("threshold calibration needs at least one distance");
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const auto& v : distances) {
    sq += (v.array() - mean).square().sum();
  }
  const double stddev = std::sqrt(sq / static_cast<double>(n));
  return mean + 2.0 * stddev;
}

}  // namespace vshadow::align
