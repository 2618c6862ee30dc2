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
// Minimal layer library with explicit backward passes. Activations are
// (frames x dim) row-major sequences. Layers cache what their backward
// needs; call order per sample is Forward then Backward before the next
// Forward.

#ifndef VSHADOW_S2S_NN_HPP_
#define VSHADOW_S2S_NN_HPP_

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "vshadow/common.hpp"

namespace vshadow::s2s {

struct Parameter {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
  Eigen::MatrixXd adam_m;
  Eigen::MatrixXd adam_v;

  void Init(const std::string& param_name, int rows, int cols);
  void ZeroGrad() { grad.setZero(); }
};

using ParamRefs = std::vector<Parameter*>;

/// Fills value row by row with N(0, stddev^2) draws.
void InitNormal(Parameter* p, double stddev, Rng* rng);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One Adam update over params; step_t counts from 1 for bias correction.
void AdamUpdate(const ParamRefs& params, const AdamConfig& config,
                int step_t);

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) = 0;
  virtual Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) = 0;
  virtual void CollectParams(ParamRefs* out) {}
};

class Linear : public Layer {
 public:
  Linear(const std::string& name, int in_dim, int out_dim, Rng* rng);
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;
  void CollectParams(ParamRefs* out) override;

  Parameter weight;  // in_dim x out_dim
  Parameter bias;    // 1 x out_dim

 private:
  Eigen::MatrixXd x_;
};

class LayerNorm : public Layer {
 public:
  LayerNorm(const std::string& name, int dim);
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;
  void CollectParams(ParamRefs* out) override;

  Parameter gamma;  // 1 x dim
  Parameter beta;   // 1 x dim

 private:
  static constexpr double kEps = 1e-5;
  Eigen::MatrixXd xhat_;
  Eigen::VectorXd inv_std_;
};

/// Width-3 convolution along the frame axis with zero padding (same
/// length out as in).
class Conv1d : public Layer {
 public:
  Conv1d(const std::string& name, int in_dim, int out_dim, Rng* rng);
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;
  void CollectParams(ParamRefs* out) override;

  // One weight per tap offset {-1, 0, +1}, each in_dim x out_dim.
  Parameter taps[3];
  Parameter bias;  // 1 x out_dim

 private:
  Eigen::MatrixXd x_;
};

class Relu : public Layer {
 public:
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;

 private:
  Eigen::MatrixXd mask_;
};

/// Full-context (unmasked) multi-head self-attention.
class MultiHeadSelfAttention : public Layer {
 public:
  MultiHeadSelfAttention(const std::string& name, int dim, int num_heads,
                         Rng* rng);
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;
  void CollectParams(ParamRefs* out) override;

  Parameter wq, wk, wv, wo;  // dim x dim
  Parameter bq, bk, bv, bo;  // 1 x dim

 private:
  int dim_;
  int num_heads_;
  int head_dim_;
  Eigen::MatrixXd x_, q_, k_, v_, concat_;
  std::vector<Eigen::MatrixXd> attn_;  // per-head row-softmax weights
};

/// Inverted dropout; identity when not training or rate is 0. Mask draws
/// come from the supplied generator, so a fixed seed fixes the masks.
class Dropout : public Layer {
 public:
  Dropout(double rate, Rng* rng);
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;

 private:
  double rate_;
  Rng* rng_;
  bool active_ = false;
  Eigen::MatrixXd mask_;
};

/// Adds fixed sinusoidal position codes; gradient passes through.
class PositionalEncoding : public Layer {
 public:
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;

  static Eigen::MatrixXd Table(int frames, int dim);
};

/// Linear chain of layers sharing one Forward/Backward protocol.
class Sequential : public Layer {
 public:
  void Add(std::unique_ptr<Layer> layer) {
    layers_.push_back(std::move(layer));
  }
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;
  void CollectParams(ParamRefs* out) override;

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// Pre-norm residual wrapper: y = x + Dropout(Inner(Norm(x))).
class Residual : public Layer {
 public:
  Residual(const std::string& name, int dim, std::unique_ptr<Layer> inner,
           double dropout_rate, Rng* rng);
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, bool train) override;
  Eigen::MatrixXd Backward(const Eigen::MatrixXd& gy) override;
  void CollectParams(ParamRefs* out) override;

 private:
  LayerNorm norm_;
  std::unique_ptr<Layer> inner_;
  Dropout dropout_;
};

/// Attention + convolutional feed-forward stack shared by the encoder and
/// decoder: per block, x += Attn(LN(x)); x += ConvFFN(LN(x)).
std::unique_ptr<Sequential> MakeBlockStack(const std::string& name,
                                           int num_blocks, int dim,
                                           int num_heads, double dropout_rate,
                                           Rng* rng);

}  // namespace vshadow::s2s

#endif  // VSHADOW_S2S_NN_HPP_
