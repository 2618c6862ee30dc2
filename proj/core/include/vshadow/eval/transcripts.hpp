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
//
// Transcript sources for error-rate evaluation: references come from the
// manifest, hypotheses from a pluggable recognizer backend.

#ifndef VSHADOW_EVAL_TRANSCRIPTS_HPP_
#define VSHADOW_EVAL_TRANSCRIPTS_HPP_

#include <string>

#include <Eigen/Core>

#include "vshadow/data/feature_sequence.hpp"
#include "vshadow/data/manifest.hpp"

namespace vshadow::eval {

class TranscriptProvider {
 public:
  virtual ~TranscriptProvider() = default;

  /// One of "oracle_manifest", "mock", "external_asr".
  virtual std::string BackendId() const = 0;

  /// Ground-truth transcript for one role of a record. Throws when the
  /// manifest carries no transcript for that role.
  virtual std::string Reference(const data::TripletRecord& record,
                                data::Role role) const;

  /// Transcribes a mel sequence.
  virtual std::string Hypothesis(const data::FeatureSequence& mel) const = 0;
};

/// Reference-only provider; Hypothesis always throws.
class OracleManifestProvider : public TranscriptProvider {
 public:
  std::string BackendId() const override { return "oracle_manifest"; }
  std::string Hypothesis(const data::FeatureSequence& mel) const override;
};

/// Nearest-centroid recognizer over the synthetic codebook. Each codeword
/// (and the breakdown row) is rendered and reduced to one mel centroid;
/// frames decode to their nearest centroid, runs collapse to single tokens,
/// and runs shorter than a minimum length are treated as transition blur
/// and dropped.
class MockAsrProvider : public TranscriptProvider {
 public:
  MockAsrProvider(const Eigen::MatrixXf& codebook, int vocab_size,
                  int sample_rate_hz);

  std::string BackendId() const override { return "mock"; }
  std::string Hypothesis(const data::FeatureSequence& mel) const override;

  static constexpr int kMinRunFrames = 3;
  /// Log-power floor applied to both sides of the centroid comparison.
  /// Differences below it are leakage, not content.
  static constexpr float kDecodeFloor = -8.0f;

 private:
  int vocab_size_;
  Eigen::MatrixXf centroids_;  // (vocab_size + 1) x num_mels
};

/// Placeholder for a real recognizer checkpoint; always throws.
class ExternalAsrProvider : public TranscriptProvider {
 public:
  explicit ExternalAsrProvider(std::string model) : model_(std::move(model)) {}

  std::string BackendId() const override { return "external_asr"; }
  std::string Hypothesis(const data::FeatureSequence& mel) const override;

 private:
  std::string model_;
};

}  // namespace vshadow::eval

#endif  // VSHADOW_EVAL_TRANSCRIPTS_HPP_
