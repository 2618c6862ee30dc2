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
// Per-system evaluation: error rates and feature similarity against the
// first-shadow references, with an optional naturalness score, rendered as
// a fixed-column table plus line-delimited records.

#ifndef VSHADOW_EVAL_REPORT_HPP_
#define VSHADOW_EVAL_REPORT_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "vshadow/data/manifest.hpp"
#include "vshadow/eval/mos.hpp"
#include "vshadow/eval/transcripts.hpp"
#include "vshadow/features/audio.hpp"

namespace vshadow::eval {

struct EvalRow {
  std::string utterance_id;
  double s1_cer = 0.0;
  double s1_wer = 0.0;
  double mos = std::numeric_limits<double>::quiet_NaN();  // NaN = not scored
  double speech_bert_score = 0.0;
};

struct EvalReport {
  std::string system_label;
  std::string target_feature;
  std::uint64_t seed = 0;
  std::vector<EvalRow> rows;
  double mean_s1_cer = 0.0;
  double mean_s1_wer = 0.0;
  double mean_mos = std::numeric_limits<double>::quiet_NaN();
  double mean_speech_bert_score = 0.0;
  std::vector<std::string> warnings;

  /// Fixed-width table with the standard column set:
  /// S1-CER ↓, S1-WER ↓, UTMOS ↑, SpeechBERTScore ↑. Unscored cells
  /// render as "-".
  std::string Table() const;

  /// One utterance record per line plus a trailing summary record.
  std::string RecordsJsonl() const;
};

struct EvalSettings {
  data::Split split = data::Split::kTest;
  int bertscore_dim = 64;
  std::uint64_t bertscore_seed = 777;
};

/// Converted outputs of one system, keyed by utterance id. Audio is
/// optional; rows without it carry no naturalness score.
struct SystemOutputs {
  std::string label;
  std::map<std::string, data::FeatureSequence> features;
  std::map<std::string, features::Waveform> audio;
};

/// Loads the first-shadow reference features for similarity scoring.
using ReferenceFeatureLoader =
    std::function<data::FeatureSequence(const data::TripletRecord&)>;

/// Maps features into the similarity-scoring space. When empty, both sides
/// go through the seeded pseudo projection from EvalSettings.
using BertScoreEmbedder =
    std::function<Eigen::MatrixXf(const data::FeatureSequence&)>;

/// Scores every record of the chosen split. Records without an output are
/// listed in warnings and skipped; everything else is scored against the
/// record's first-shadow transcript and reference features. Aggregates are
/// arithmetic means over the scored rows.
EvalReport EvaluateSystem(const SystemOutputs& outputs,
                          const data::Manifest& manifest,
                          const TranscriptProvider& transcripts,
                          const MosPredictor* mos,
                          const ReferenceFeatureLoader& reference_features,
                          const BertScoreEmbedder& embedder,
                          const EvalSettings& settings);

}  // namespace vshadow::eval

#endif  // VSHADOW_EVAL_REPORT_HPP_
