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

#include "vshadow/s2s/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace vshadow::s2s {

const std::vector<std::string> kAllGroups = {
    kGroupAlignment, kGroupDecoder, kGroupDurationPredictor, kGroupEncoder};

void ModelConfig::Validate() const {
  if (source_dim < 1 || target_dim < 1 || hidden_dim < 1 ||
      alignment_dim < 1) {
    throw Error("model dims must be positive");
  }
  if (num_encoder_blocks < 1 || num_decoder_blocks < 1 ||
      attention_heads < 1) {
    throw Error("block and head counts must be positive");
  }
  if (hidden_dim % attention_heads != 0) {
    throw Error("hidden_dim must be divisible by attention_heads");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw Error("dropout must be in [0, 1)");
  }
  if (loss_weights.recon < 0.0 || loss_weights.forward_sum < 0.0 ||
      loss_weights.duration < 0.0) {
    throw Error("loss weights must be nonnegative");
  }
}

std::string ModelConfigToJsonText(const ModelConfig& config) {
  nlohmann::json j;
  j["source_dim"] = config.source_dim;
  j["target_dim"] = config.target_dim;
  j["hidden_dim"] = config.hidden_dim;
  j["num_encoder_blocks"] = config.num_encoder_blocks;
  j["num_decoder_blocks"] = config.num_decoder_blocks;
  j["attention_heads"] = config.attention_heads;
  j["dropout"] = config.dropout;
  j["alignment_dim"] = config.alignment_dim;
  j["loss_weights"] = {{"recon", config.loss_weights.recon},
                       {"forward_sum", config.loss_weights.forward_sum},
                       {"duration", config.loss_weights.duration}};
  return j.dump();
}

ModelConfig ModelConfigFromJsonText(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model config is not valid json: ") + e.what());
  }
  ModelConfig config;
  try {
    config.source_dim = j.value("source_dim", config.source_dim);
    config.target_dim = j.value("target_dim", config.target_dim);
    config.hidden_dim = j.value("hidden_dim", config.hidden_dim);
    config.num_encoder_blocks =
        j.value("num_encoder_blocks", config.num_encoder_blocks);
    config.num_decoder_blocks =
        j.value("num_decoder_blocks", config.num_decoder_blocks);
    config.attention_heads = j.value("attention_heads", config.attention_heads);
    config.dropout = j.value("dropout", config.dropout);
    config.alignment_dim = j.value("alignment_dim", config.alignment_dim);
    if (j.contains("loss_weights")) {
      const auto& w = j.at("loss_weights");
      config.loss_weights.recon = w.value("recon", config.loss_weights.recon);
      config.loss_weights.forward_sum =
          w.value("forward_sum", config.loss_weights.forward_sum);
      config.loss_weights.duration =
          w.value("duration", config.loss_weights.duration);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad model config field: ") + e.what());
  }
  return config;
}

Model::Model(const ModelConfig& config, std::uint64_t seed)
    : config_(config) {
  config.Validate();
  rng_ = std::make_unique<Rng>(seed);
  Rng* rng = rng_.get();

  encoder_ = std::make_unique<Sequential>();
  encoder_->Add(std::make_unique<Linear>("encoder.in_proj", config.source_dim,
                                         config.hidden_dim, rng));
  encoder_->Add(std::make_unique<PositionalEncoding>());
  encoder_->Add(MakeBlockStack("encoder", config.num_encoder_blocks,
                               config.hidden_dim, config.attention_heads,
                               config.dropout, rng));
  encoder_->Add(std::make_unique<LayerNorm>("encoder.norm",
                                            config.hidden_dim));

  align_enc_proj_ = std::make_unique<Linear>(
      "alignment.enc_proj", config.hidden_dim, config.alignment_dim, rng);
  align_tgt_proj_ = std::make_unique<Linear>(
      "alignment.tgt_proj", config.target_dim, config.alignment_dim, rng);

  duration_predictor_ = std::make_unique<Sequential>();
  duration_predictor_->Add(std::make_unique<Conv1d>(
      "duration_predictor.conv0", config.hidden_dim, config.hidden_dim, rng));
  duration_predictor_->Add(std::make_unique<Relu>());
  duration_predictor_->Add(std::make_unique<LayerNorm>(
      "duration_predictor.norm0", config.hidden_dim));
  duration_predictor_->Add(std::make_unique<Conv1d>(
      "duration_predictor.conv1", config.hidden_dim, config.hidden_dim, rng));
  duration_predictor_->Add(std::make_unique<Relu>());
  duration_predictor_->Add(std::make_unique<LayerNorm>(
      "duration_predictor.norm1", config.hidden_dim));
  duration_predictor_->Add(std::make_unique<Linear>(
      "duration_predictor.out", config.hidden_dim, 1, rng));

  decoder_ = std::make_unique<Sequential>();
  decoder_->Add(std::make_unique<PositionalEncoding>());
  decoder_->Add(MakeBlockStack("decoder", config.num_decoder_blocks,
                               config.hidden_dim, config.attention_heads,
                               config.dropout, rng));
  decoder_->Add(std::make_unique<LayerNorm>("decoder.norm",
                                            config.hidden_dim));
  decoder_->Add(std::make_unique<Linear>("decoder.out_proj",
                                         config.hidden_dim,
                                         config.target_dim, rng));
}

Eigen::MatrixXd Model::Encode(const data::FeatureSequence& src) {
  if (Empty()) throw Error("model has no parameters loaded");
  src.Validate();
  if (src.Dim() != config_.source_dim) {
    throw Error("encode: input dim " + std::to_string(src.Dim()) +
                " != source_dim " + std::to_string(config_.source_dim));
  }
  return encoder_->Forward(src.data.cast<double>(), /*train=*/false);
}

Eigen::MatrixXd Model::RawScores(const Eigen::MatrixXd& enc,
                                 const Eigen::MatrixXd& tgt) {
  align_p_ = align_enc_proj_->Forward(enc, /*train=*/true);
  align_q_ = align_tgt_proj_->Forward(tgt, /*train=*/true);
  const double scale = 1.0 / std::sqrt(static_cast<double>(
                                config_.alignment_dim));
  const Eigen::VectorXd pn = align_p_.rowwise().squaredNorm();
  const Eigen::VectorXd qn = align_q_.rowwise().squaredNorm();
  Eigen::MatrixXd s =
      (2.0 * align_p_ * align_q_.transpose()).colwise() - pn;
  s.rowwise() -= qn.transpose();
  return s * scale;
}

void Model::ScoresBackward(const Eigen::MatrixXd& gscores,
                           Eigen::MatrixXd* genc) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(
                                config_.alignment_dim));
  const Eigen::VectorXd row_sums = gscores.rowwise().sum();
  const Eigen::VectorXd col_sums = gscores.colwise().sum().transpose();
  // s_ij = -|p_i - q_j|^2 * scale.
  const Eigen::MatrixXd gp =
      (-2.0 * scale) *
      (row_sums.asDiagonal() * align_p_ - gscores * align_q_);
  const Eigen::MatrixXd gq =
      (2.0 * scale) *
      (gscores.transpose() * align_p_ - col_sums.asDiagonal() * align_q_);
  *genc += align_enc_proj_->Backward(gp);
  align_tgt_proj_->Backward(gq);  // target frames are data, grad discarded
}

align::ScoreMatrix Model::SoftAlignment(const Eigen::MatrixXd& enc,
                                        const Eigen::MatrixXd& tgt) {
  if (Empty()) throw Error("model has no parameters loaded");
  Eigen::MatrixXd raw = RawScores(enc, tgt);
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double m = raw.col(j).maxCoeff();
    const double lse = m + std::log((raw.col(j).array() - m).exp().sum());
    raw.col(j).array() -= lse;
  }
  align::ScoreMatrix out;
  out.values = std::move(raw);
  out.semantics = align::ScoreSemantics::kLogLikelihood;
  return out;
}

Eigen::VectorXd Model::PredictDurations(const Eigen::MatrixXd& enc) {
  if (Empty()) throw Error("model has no parameters loaded");
  const Eigen::MatrixXd logd =
      duration_predictor_->Forward(enc, /*train=*/false);
  return logd.col(0).array().exp();
}

Eigen::MatrixXd UpsampleRows(const Eigen::MatrixXd& x,
                             const std::vector<int>& reps) {
  if (static_cast<Eigen::Index>(reps.size()) != x.rows()) {
    throw Error("upsample: reps length != rows");
  }
  Eigen::Index total = 0;
  for (int r : reps) {
    if (r < 0) throw Error("upsample: negative repeat count");
    total += r;
  }
  Eigen::MatrixXd out(total, x.cols());
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (int r = 0; r < reps[i]; ++r) out.row(row++) = x.row(i);
  }
  return out;
}

namespace {

// Adjoint of UpsampleRows: sums output-row grads per source row.
Eigen::MatrixXd SumRowGrads(const Eigen::MatrixXd& gy,
                            const std::vector<int>& reps, int rows) {
  Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(rows, gy.cols());
  Eigen::Index row = 0;
  for (int i = 0; i < rows; ++i) {
    for (int r = 0; r < reps[i]; ++r) gx.row(i) += gy.row(row++);
  }
  return gx;
}

Eigen::MatrixXd PadTargetRows(const Eigen::MatrixXd& tgt, Eigen::Index rows) {
  Eigen::MatrixXd out(rows, tgt.cols());
  out.topRows(tgt.rows()) = tgt;
  for (Eigen::Index r = tgt.rows(); r < rows; ++r) {
    out.row(r) = tgt.row(tgt.rows() - 1);
  }
  return out;
}

}  // namespace

LossBreakdown Model::TrainStep(const std::vector<TrainPair>& batch,
                               const std::set<std::string>& frozen_groups,
                               const AdamConfig& adam) {
  if (Empty()) throw Error("model has no parameters loaded");
  if (batch.empty()) throw Error("train step needs a non-empty batch");
  for (const std::string& g : frozen_groups) {
    if (std::find(kAllGroups.begin(), kAllGroups.end(), g) ==
        kAllGroups.end()) {
      throw Error("unknown frozen group: " + g);
    }
  }

  auto groups = Groups();
  for (auto& [name, params] : groups) {
    for (Parameter* p : params) p->ZeroGrad();
  }

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const LossWeights& w = config_.loss_weights;
  LossBreakdown out;

  for (const TrainPair& pair : batch) {
    if (pair.source.cols() != config_.source_dim ||
        pair.target.cols() != config_.target_dim) {
      throw Error("train pair dims do not match model config");
    }
    if (pair.source.rows() < 1 || pair.target.rows() < 1) {
      throw Error("train pair has an empty sequence");
    }
    // MAS needs T_tgt >= T_src; short targets are right-padded with their
    // final frame.
    const Eigen::MatrixXd tgt =
        pair.target.rows() < pair.source.rows()
            ? PadTargetRows(pair.target, pair.source.rows())
            : pair.target;

    const Eigen::MatrixXd enc = encoder_->Forward(pair.source, /*train=*/true);
    const Eigen::MatrixXd raw = RawScores(enc, tgt);

    align::ScoreMatrix lattice;
    lattice.values = raw;
    lattice.semantics = align::ScoreSemantics::kLogLikelihood;
    const std::vector<int> durations = align::MasDurations(
        align::Mas(lattice), static_cast<int>(pair.source.rows()));

    const Eigen::MatrixXd ups = UpsampleRows(enc, durations);
    const Eigen::MatrixXd dec_out = decoder_->Forward(ups, /*train=*/true);
    const Eigen::MatrixXd diff = dec_out - tgt;
    const double numel = static_cast<double>(diff.size());
    const double recon_k = diff.array().abs().sum() / numel;

    Eigen::MatrixXd gscores_fs;
    const double fs_k = align::ForwardSumWithGrad(lattice, &gscores_fs);

    const Eigen::MatrixXd logd =
        duration_predictor_->Forward(enc, /*train=*/true);
    Eigen::VectorXd target_logd(durations.size());
    for (size_t i = 0; i < durations.size(); ++i) {
      target_logd[static_cast<Eigen::Index>(i)] =
          std::log(static_cast<double>(durations[i]));
    }
    const Eigen::VectorXd dur_diff = logd.col(0) - target_logd;
    const double t_src = static_cast<double>(pair.source.rows());
    const double dur_k = dur_diff.squaredNorm() / t_src;

    out.recon += recon_k * inv_b;
    out.forward_sum += fs_k * inv_b;
    out.duration += dur_k * inv_b;

    // Backward. Decoder path first, then the alignment loss path, then one
    // encoder pass over the summed hidden-state gradient. The duration
    // predictor reads the encoder output as data (no gradient into the
    // encoder).
    const Eigen::MatrixXd gdec_out =
        (w.recon * inv_b / numel) * diff.array().sign().matrix();
    const Eigen::MatrixXd gups = decoder_->Backward(gdec_out);
    Eigen::MatrixXd genc = SumRowGrads(gups, durations,
                                       static_cast<int>(pair.source.rows()));
    ScoresBackward((w.forward_sum * inv_b) * gscores_fs, &genc);

    Eigen::MatrixXd glogd = Eigen::MatrixXd::Zero(logd.rows(), 1);
    glogd.col(0) = (w.duration * inv_b) * (2.0 / t_src) * dur_diff;
    duration_predictor_->Backward(glogd);

    encoder_->Backward(genc);
  }

  out.total = w.recon * out.recon + w.forward_sum * out.forward_sum +
              w.duration * out.duration;
  if (!std::isfinite(out.total)) {
    std::ostringstream msg;
    msg << "non-finite training loss: recon=" << out.recon
        << " forward_sum=" << out.forward_sum << " duration=" << out.duration;
    throw Error(msg.str());
  }

  ParamRefs trainable;
  for (auto& [name, params] : groups) {
    if (frozen_groups.count(name)) {
      for (Parameter* p : params) p->ZeroGrad();
    } else {
      trainable.insert(trainable.end(), params.begin(), params.end());
    }
  }
  ++step_;
  AdamUpdate(trainable, adam, step_);
  return out;
}

data::FeatureSequence Model::Convert(const data::FeatureSequence& src,
                                     data::FeatureKind out_kind) {
  if (Empty()) throw Error("model has no parameters loaded");
  const Eigen::MatrixXd enc = Encode(src);
  const Eigen::VectorXd durations = PredictDurations(enc);
  std::vector<int> reps(durations.size());
  for (Eigen::Index i = 0; i < durations.size(); ++i) {
    reps[static_cast<size_t>(i)] =
        static_cast<int>(RoundHalfUp(std::max(durations[i], 1.0)));
  }
  const Eigen::MatrixXd ups = UpsampleRows(enc, reps);
  const Eigen::MatrixXd dec_out = decoder_->Forward(ups, /*train=*/false);
  return data::MakeFeatureSequence(dec_out.cast<float>(), src.stride_ms,
                                   out_kind);
}

std::map<std::string, ParamRefs> Model::Groups() {
  if (Empty()) throw Error("model has no parameters loaded");
  std::map<std::string, ParamRefs> groups;
  encoder_->CollectParams(&groups[kGroupEncoder]);
  decoder_->CollectParams(&groups[kGroupDecoder]);
  duration_predictor_->CollectParams(&groups[kGroupDurationPredictor]);
  align_enc_proj_->CollectParams(&groups[kGroupAlignment]);
  align_tgt_proj_->CollectParams(&groups[kGroupAlignment]);
  return groups;
}

}  // namespace vshadow::s2s
