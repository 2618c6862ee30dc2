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

#ifndef VSHADOW_S2S_MODEL_HPP_
#define VSHADOW_S2S_MODEL_HPP_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "vshadow/align/kernels.hpp"
#include "vshadow/data/feature_sequence.hpp"
#include "vshadow/s2s/nn.hpp"

namespace vshadow::s2s {

struct LossWeights {
  double recon = 1.0;
  double forward_sum = 0.1;
  double duration = 0.1;
};

struct ModelConfig {
  int source_dim = 0;
  int target_dim = 0;
  int hidden_dim = 128;
  int num_encoder_blocks = 2;
  int num_decoder_blocks = 2;
  int attention_heads = 2;
  double dropout = 0.1;
  int alignment_dim = 32;
  LossWeights loss_weights;

  void Validate() const;
};

std::string ModelConfigToJsonText(const ModelConfig& config);
ModelConfig ModelConfigFromJsonText(const std::string& text);

struct LossBreakdown {
  double recon = 0.0;
  double forward_sum = 0.0;
  double duration = 0.0;
  double total = 0.0;
};

struct TrainPair {
  Eigen::MatrixXd source;  // T_src x source_dim
  Eigen::MatrixXd target;  // T_tgt x target_dim
};

// Parameter group names, also the checkpoint group keys.
inline constexpr const char* kGroupEncoder = "encoder";
inline constexpr const char* kGroupDecoder = "decoder";
inline constexpr const char* kGroupDurationPredictor = "duration_predictor";
inline constexpr const char* kGroupAlignment = "alignment";
extern const std::vector<std::string> kAllGroups;

/// Non-autoregressive converter: encoder -> (alignment, durations) ->
/// length-regulated decoder. A default-constructed Model is empty and
/// only becomes usable through the config constructor or checkpoint
/// restore.
class Model {
 public:
  Model() = default;
  Model(const ModelConfig& config, std::uint64_t seed);

  bool Empty() const { return encoder_ == nullptr; }
  const ModelConfig& Config() const { return config_; }
  int Step() const { return step_; }
  void SetStep(int step) { step_ = step; }

  /// Hidden states (T_src x hidden_dim), inference mode.
  Eigen::MatrixXd Encode(const data::FeatureSequence& src);

  /// Raw alignment scores -|p_i - q_j|^2 / sqrt(alignment_dim) after
  /// column log-softmax over the source axis.
  align::ScoreMatrix SoftAlignment(const Eigen::MatrixXd& enc,
                                   const Eigen::MatrixXd& tgt);

  /// exp of predicted log-durations; strictly positive, length T_src.
  Eigen::VectorXd PredictDurations(const Eigen::MatrixXd& enc);

  /// One optimizer step over the batch. Losses are batch means and
  /// total = recon_w * recon + forward_sum_w * forward_sum +
  /// duration_w * duration, computed in exactly that order. Gradients of
  /// frozen groups are zeroed and their parameters are skipped by the
  /// optimizer.
  LossBreakdown TrainStep(const std::vector<TrainPair>& batch,
                          const std::set<std::string>& frozen_groups,
                          const AdamConfig& adam);

  /// Inference: durations define the output length as
  /// sum round-half-up(max(d_i, 1)). Pure function of (parameters, src).
  data::FeatureSequence Convert(const data::FeatureSequence& src,
                                data::FeatureKind out_kind);

  /// Parameter groups keyed by name, sorted by key.
  std::map<std::string, ParamRefs> Groups();

 private:
  Eigen::MatrixXd RawScores(const Eigen::MatrixXd& enc,
                            const Eigen::MatrixXd& tgt);
  void ScoresBackward(const Eigen::MatrixXd& gscores, Eigen::MatrixXd* genc);

  ModelConfig config_;
  std::unique_ptr<Rng> rng_;
  std::unique_ptr<Sequential> encoder_;
  std::unique_ptr<Linear> align_enc_proj_;
  std::unique_ptr<Linear> align_tgt_proj_;
  std::unique_ptr<Sequential> duration_predictor_;
  std::unique_ptr<Sequential> decoder_;
  Eigen::MatrixXd align_p_, align_q_;
  int step_ = 0;
};

/// Repeats row i of x reps[i] times (the length regulator).
Eigen::MatrixXd UpsampleRows(const Eigen::MatrixXd& x,
                             const std::vector<int>& reps);

}  // namespace vshadow::s2s

#endif  // VSHADOW_S2S_MODEL_HPP_
