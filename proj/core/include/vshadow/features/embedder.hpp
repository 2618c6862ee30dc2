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

#ifndef VSHADOW_FEATURES_EMBEDDER_HPP_
#define VSHADOW_FEATURES_EMBEDDER_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "vshadow/data/feature_sequence.hpp"
#include "vshadow/features/audio.hpp"

namespace vshadow::features {

/// Request for one embedding extraction. output_dim 0 means "the expected
/// dim for the kind". layer_index selects the hidden layer for s3r-style
/// backends and is ignored elsewhere.
struct EmbedderSpec {
  data::FeatureKind kind = data::FeatureKind::kMel;
  int layer_index = 9;
  int output_dim = 0;
  double stride_ms = 20.0;
};

/// Deterministic projection rows * P / 4 with P seeded, entries
/// N(0,1)/sqrt(in_dim), filled row by row. Shared by the pseudo embedder
/// and feature-space similarity scoring.
Eigen::MatrixXf PseudoProjectRows(const Eigen::MatrixXf& rows, int dim,
                                  std::uint64_t seed);

/// Stand-in embedder: log-mel shifted to nonnegative (minus the log floor),
/// then PseudoProjectRows. Same frame count and stride as the mel front
/// end. Returned kind is kOther; registry wrappers relabel it.
data::FeatureSequence PseudoEmbed(const Waveform& w, int dim,
                                  std::uint64_t seed);

/// Maps feature kinds to embedding backends. Configured from JSON:
///   {"mel": {"backend": "mel"},
///    "ppg_bnf": {"backend": "pseudo", "seed": 101},
///    "s3r": {"backend": "pseudo", "seed": 202, "layer_index": 9}}
/// Backend "external" carries a "model" id and fails at extraction time
/// with an error naming that model; it documents what a full deployment
/// would load without bundling it.
class EmbedderRegistry {
 public:
  struct Backend {
    std::string id;  // "mel", "pseudo", "external"
    int dim = 0;
    std::uint64_t seed = 0;
    int layer_index = 9;
    std::string model;
  };

  static EmbedderRegistry Default();
  static EmbedderRegistry FromJsonText(const std::string& text);
  static EmbedderRegistry FromJsonFile(const std::string& path);

  bool HasBackend(data::FeatureKind kind) const;
  const Backend& BackendFor(data::FeatureKind kind) const;

  data::FeatureSequence Embed(const Waveform& w,
                              data::FeatureKind kind) const;
  data::FeatureSequence Embed(const Waveform& w,
                              const EmbedderSpec& spec) const;

 private:
  std::map<data::FeatureKind, Backend> backends_;
};

}  // namespace vshadow::features

#endif  // VSHADOW_FEATURES_EMBEDDER_HPP_
