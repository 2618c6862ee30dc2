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
// Deterministic synthetic triplet corpus. Utterances are token-segment
// sequences in a small latent space: the script-shadow take renders the
// clean segments, the first-shadow take replaces a fraction of segments
// with a noisy breakdown codeword, and the learner take is a compressed
// time-warp of the script-shadow take with a mild channel perturbation.

#ifndef VSHADOW_DATA_SYNTHETIC_HPP_
#define VSHADOW_DATA_SYNTHETIC_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "vshadow/data/manifest.hpp"
#include "vshadow/features/audio.hpp"

namespace vshadow::data {

struct SyntheticConfig {
  int num_triplets = 50;
  double corruption_rate = 0.0;
  std::uint64_t seed = 42;
  int latent_dim = 16;
  int vocab_size = 24;
  int min_segments = 6;
  int max_segments = 10;
  int min_segment_frames = 8;
  int max_segment_frames = 12;
  double breakdown_noise = 0.08;
  int sample_rate_hz = 16000;

  void Validate() const;
};

/// Half-open frame range [start, end) of one token segment.
struct TruthSegment {
  int start = 0;
  int end = 0;
  std::string token;
  bool corrupted = false;
};

struct SyntheticTruth {
  std::string utterance_id;
  std::vector<TruthSegment> segments;
};

SyntheticTruth LoadSyntheticTruth(const std::string& path);

/// "w00".."wNN" for codeword rows, "uh" for the breakdown row at
/// index == vocab_size.
std::string SyntheticTokenName(int index, int vocab_size);

inline constexpr int kRenderSamplesPerFrame = 320;  // 20 ms at 16 kHz

/// Latent channels that drive audio. Channels at and above this index are
/// alignment-only: they shape frame-to-frame distances without changing
/// the rendered waveform.
inline constexpr int kRenderChannels = 8;

/// Sinusoid-bank rendering: one latent row becomes one 20 ms frame; each
/// render channel drives the amplitude of one fixed partial. Phase is
/// continuous across frames.
features::Waveform RenderLatentFrames(const Eigen::MatrixXf& latents,
                                      int sample_rate_hz);

struct SyntheticCorpus {
  Manifest manifest;
  std::string root_dir;
  Eigen::MatrixXf codebook;  // (vocab_size + 1) x latent_dim
};

/// Writes wav/<role>/<id>.wav, latents/<role>/<id>.vshd, truth/<id>.json,
/// codebook.vshd and manifest.jsonl under out_dir. Pure function of the
/// config, byte for byte.
SyntheticCorpus GenerateSyntheticCorpus(const SyntheticConfig& config,
                                        const std::string& out_dir);

}  // namespace vshadow::data

#endif  // VSHADOW_DATA_SYNTHETIC_HPP_
