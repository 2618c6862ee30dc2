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

#include "vshadow/eval/metrics.hpp"

#include <cctype>
#include <cstdint>

#include "vshadow/common.hpp"

namespace vshadow::eval {

std::vector<std::string> Tokenize(const std::string& text, Tokenizer mode) {
  std::vector<std::string> tokens;
  if (mode == Tokenizer::kChar) {
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        tokens.emplace_back(1, c);
      }
    }
    return tokens;
  }
  std::string current;
  for (char c : text) {
    const unsigned char uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (!std::ispunct(uc)) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

EditCounts ComputeEditCounts(const std::vector<std::string>& hyp,
                             const std::vector<std::string>& ref) {
  const int m = static_cast<int>(hyp.size());
  const int n = static_cast<int>(ref.size());
  // dist[i][j]: edits between hyp[0..i) and ref[0..j).
  std::vector<std::vector<int>> dist(m + 1, std::vector<int>(n + 1, 0));
  enum Move : std::uint8_t { kMatch, kSubstitute, kInsert, kDelete };
  std::vector<std::vector<std::uint8_t>> back(
      m + 1, std::vector<std::uint8_t>(n + 1, kMatch));
  for (int i = 1; i <= m; ++i) {
    dist[i][0] = i;
    back[i][0] = kInsert;
  }
  for (int j = 1; j <= n; ++j) {
    dist[0][j] = j;
    back[0][j] = kDelete;
  }
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= n; ++j) {
      const bool match = hyp[i - 1] == ref[j - 1];
      // Strictly-less comparisons keep the earlier-preferred move on
      // ties: diagonal, then insertion, then deletion.
      int best = dist[i - 1][j - 1] + (match ? 0 : 1);
      std::uint8_t move = match ? kMatch : kSubstitute;
      if (dist[i - 1][j] + 1 < best) {
        best = dist[i - 1][j] + 1;
        move = kInsert;
      }
      if (dist[i][j - 1] + 1 < best) {
        best = dist[i][j - 1] + 1;
        move = kDelete;
      }
      dist[i][j] = best;
      back[i][j] = move;
    }
  }

  EditCounts counts;
  counts.ref_length = n;
  int i = m;
  int j = n;
  while (i > 0 || j > 0) {
    switch (back[i][j]) {
      case kMatch:
        --i;
        --j;
        break;
      case kSubstitute:
        ++counts.substitutions;
        --i;
        --j;
        break;
      case kInsert:
        ++counts.insertions;
        --i;
        break;
      case kDelete:
        ++counts.deletions;
        --j;
        break;
    }
  }
  return counts;
}

double S1ErrorRate(const std::string& hyp_transcript,
                   const std::string& ref_transcript, Tokenizer mode) {
  const std::vector<std::string> hyp = Tokenize(hyp_transcript, mode);
  const std::vector<std::string> ref = Tokenize(ref_transcript, mode);
  if (ref.empty()) {
    throw Error("reference transcript is empty after tokenization");
  }
  const EditCounts counts = ComputeEditCounts(hyp, ref);
  return static_cast<double>(counts.TotalEdits()) /
         static_cast<double>(counts.ref_length);
}

double SpeechBertScoreRows(const Eigen::MatrixXf& gen,
                           const Eigen::MatrixXf& ref) {
  if (gen.cols() != ref.cols()) {
    throw Error("feature dim mismatch: " + std::to_string(gen.cols()) +
                " vs " + std::to_string(ref.cols()));
  }
  if (gen.rows() < 1 || ref.rows() < 1) {
    throw Error("both sequences must be non-empty");
  }
  auto normalized = [](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = x;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const double norm = out.row(r).norm();
      if (norm > 0.0) {
        out.row(r) /= norm;
      } else {
        out.row(r).setZero();  // zero frames score cosine 0
      }
    }
    return out;
  };
  const Eigen::MatrixXd gn = normalized(gen.cast<double>());
  const Eigen::MatrixXd rn = normalized(ref.cast<double>());
  const Eigen::MatrixXd sim = gn * rn.transpose();
  return sim.rowwise().maxCoeff().mean();
}

double SpeechBertScore(const data::FeatureSequence& gen,
                       const data::FeatureSequence& ref) {
  return SpeechBertScoreRows(gen.data, ref.data);
}

}  // namespace vshadow::eval
