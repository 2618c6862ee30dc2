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

#ifndef VSHADOW_EVAL_METRICS_HPP_
#define VSHADOW_EVAL_METRICS_HPP_

#include <string>
#include <vector>

#include "vshadow/data/feature_sequence.hpp"

namespace vshadow::eval {

struct EditCounts {
  int substitutions = 0;
  int insertions = 0;  // hypothesis tokens with no reference counterpart
  int deletions = 0;   // reference tokens missing from the hypothesis
  int ref_length = 0;

  int TotalEdits() const { return substitutions + insertions + deletions; }
};

enum class Tokenizer { kWord, kChar };

/// Word mode lowercases, strips punctuation, splits on whitespace. Char
/// mode yields each non-space character unchanged.
std::vector<std::string> Tokenize(const std::string& text, Tokenizer mode);

/// Minimal-edit decomposition between token lists. Ties prefer a
/// substitution over an insert+delete pair; among the remaining moves,
/// insertion before deletion.
EditCounts ComputeEditCounts(const std::vector<std::string>& hyp,
                             const std::vector<std::string>& ref);

/// (S + I + D) / N over the reference tokenization. Throws if the
/// reference is empty after tokenization.
double S1ErrorRate(const std::string& hyp_transcript,
                   const std::string& ref_transcript, Tokenizer mode);

/// Precision-style score: mean over generated frames of the best cosine
/// similarity against any reference frame. Zero frames score cosine 0.
double SpeechBertScore(const data::FeatureSequence& gen,
                       const data::FeatureSequence& ref);

/// Same score on raw row matrices (used with projected feature spaces).
double SpeechBertScoreRows(const Eigen::MatrixXf& gen,
                           const Eigen::MatrixXf& ref);

}  // namespace vshadow::eval

#endif  // VSHADOW_EVAL_METRICS_HPP_
