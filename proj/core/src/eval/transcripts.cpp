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

#include "vshadow/eval/transcripts.hpp"

#include <vector>

#include "vshadow/data/synthetic.hpp"
#include "vshadow/features/mel.hpp"

namespace vshadow::eval {

namespace {

// Frames rendered per codeword when building centroids; the middle frame is
// free of onset/offset window effects.
constexpr int kCentroidFrames = 9;

}  // namespace

std::string TranscriptProvider::Reference(const data::TripletRecord& record,
                                          data::Role role) const {
  const auto it = record.transcripts.find(role);
  if (it == record.transcripts.end()) {
    throw Error("manifest record '" + record.utterance_id +
                "' has no transcript for role " + data::RoleName(role));
  }
  return it->second;
}

std::string OracleManifestProvider::Hypothesis(
    const data::FeatureSequence& mel) const {
  (void)mel;
  throw Error(
      "the oracle_manifest provider serves references only and cannot "
      "transcribe features");
}

MockAsrProvider::MockAsrProvider(const Eigen::MatrixXf& codebook,
                                 int vocab_size, int sample_rate_hz)
    : vocab_size_(vocab_size) {
  if (vocab_size < 1 || codebook.rows() != vocab_size + 1) {
    throw Error("codebook must have vocab_size + 1 rows, got " +
                std::to_string(codebook.rows()) + " for vocab of " +
                std::to_string(vocab_size));
  }
  features::MelConfig mel_config;
  centroids_.resize(codebook.rows(), mel_config.num_mels);
  for (int r = 0; r < codebook.rows(); ++r) {
    Eigen::MatrixXf latents =
        codebook.row(r).replicate(kCentroidFrames, 1);
    const features::Waveform w =
        data::RenderLatentFrames(latents, sample_rate_hz);
    const data::FeatureSequence mel = features::ExtractMel(w, mel_config);
    centroids_.row(r) = mel.data.row(kCentroidFrames / 2).cwiseMax(kDecodeFloor);
  }
}

std::string MockAsrProvider::Hypothesis(const data::FeatureSequence& mel) const {
  if (mel.Dim() != static_cast<int>(centroids_.cols())) {
    throw Error("mel dim " + std::to_string(mel.Dim()) +
                " does not match centroid dim " +
                std::to_string(centroids_.cols()));
  }
  std::vector<int> frame_tokens(static_cast<std::size_t>(mel.Frames()));
  for (int f = 0; f < mel.Frames(); ++f) {
    const Eigen::RowVectorXf frame = mel.data.row(f).cwiseMax(kDecodeFloor);
    int best = 0;
    float best_d2 = (centroids_.row(0) - frame).squaredNorm();
    for (int r = 1; r < centroids_.rows(); ++r) {
      const float d2 = (centroids_.row(r) - frame).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = r;
      }
    }
    frame_tokens[f] = best;
  }

  std::string out;
  int run_start = 0;
  for (int f = 1; f <= static_cast<int>(frame_tokens.size()); ++f) {
    if (f < static_cast<int>(frame_tokens.size()) &&
        frame_tokens[f] == frame_tokens[run_start]) {
      continue;
    }
    if (f - run_start >= kMinRunFrames) {
      if (!out.empty()) out += ' ';
      out += data::SyntheticTokenName(frame_tokens[run_start], vocab_size_);
    }
    run_start = f;
  }
  return out;
}

std::string ExternalAsrProvider::Hypothesis(
    const data::FeatureSequence& mel) const {
  (void)mel;
  throw Error("external ASR backend '" + model_ +
              "' is not available in this build");
}

}  // namespace vshadow::eval
