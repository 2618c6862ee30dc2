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

#include "vshadow/data/feature_sequence.hpp"

#include <cmath>

namespace vshadow::data {

std::string FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMel:
      return "mel";
    case FeatureKind::kPpgBnf:
      return "ppg_bnf";
    case FeatureKind::kS3r:
      return "s3r";
    case FeatureKind::kOther:
      return "other";
  }
  throw Error("unknown feature kind");
}

FeatureKind FeatureKindFromName(const std::string& name) {
  if (name == "mel") return FeatureKind::kMel;
  if (name == "ppg_bnf") return FeatureKind::kPpgBnf;
  if (name == "s3r") return FeatureKind::kS3r;
  if (name == "other") return FeatureKind::kOther;
  throw Error("unknown feature kind: '" + name + "'");
}

int ExpectedDim(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMel:
      return 80;
    case FeatureKind::kPpgBnf:
      return 144;
    case FeatureKind::kS3r:
      return 768;
    case FeatureKind::kOther:
      return 0;
  }
  throw Error("unknown feature kind");
}

void FeatureSequence::Validate() const {
  if (data.rows() < 1) throw Error("feature sequence has no frames");
  if (data.cols() < 1) throw Error("feature sequence has zero dim");
  if (!(stride_ms > 0.0)) throw Error("feature stride must be positive");
  if (!data.allFinite()) throw Error("feature sequence has non-finite values");
  const int expected = ExpectedDim(kind);
  if (expected != 0 && Dim() != expected) {
    throw Error("feature kind '" + FeatureKindName(kind) + "' expects dim " +
                std::to_string(expected) + ", got " + std::to_string(Dim()));
  }
}

FeatureSequence MakeFeatureSequence(Eigen::MatrixXf data, double stride_ms,
                                    FeatureKind kind) {
  FeatureSequence seq;
  seq.data = std::move(data);
  seq.stride_ms = stride_ms;
  seq.kind = kind;
  seq.Validate();
  return seq;
}

}  // namespace vshadow::data
