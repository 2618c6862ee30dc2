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

#ifndef VSHADOW_DATA_FEATURE_SEQUENCE_HPP_
#define VSHADOW_DATA_FEATURE_SEQUENCE_HPP_

#include <Eigen/Core>
#include <string>

#include "vshadow/common.hpp"

namespace vshadow::data {

enum class FeatureKind { kMel, kPpgBnf, kS3r, kOther };

std::string FeatureKindName(FeatureKind kind);
FeatureKind FeatureKindFromName(const std::string& name);

/// Feature dimension a kind is pinned to, or 0 when unconstrained.
int ExpectedDim(FeatureKind kind);

/// Framewise feature matrix, one row per frame. Values are float32 to match
/// the on-disk container; kernels widen to double internally.
struct FeatureSequence {
  Eigen::MatrixXf data;  // num_frames x dim
  double stride_ms = 20.0;
  FeatureKind kind = FeatureKind::kOther;

  int Frames() const { return static_cast<int>(data.rows()); }
  int Dim() const { return static_cast<int>(data.cols()); }

  /// Enforces: at least one frame, finite values, positive stride, and the
  /// per-kind dimension constraint. Throws Error on violation.
  void Validate() const;
};

FeatureSequence MakeFeatureSequence(Eigen::MatrixXf data, double stride_ms,
                                    FeatureKind kind);

}  // namespace vshadow::data

#endif  // VSHADOW_DATA_FEATURE_SEQUENCE_HPP_
