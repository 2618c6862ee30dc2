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

#include "vshadow/s2s/nn.hpp"

#include <cmath>
#include <utility>

namespace vshadow::s2s {

void Parameter::Init(const std::string& param_name, int rows, int cols) {
  name = param_name;
  value = Eigen::MatrixXd::Zero(rows, cols);
  grad = Eigen::MatrixXd::Zero(rows, cols);
  adam_m = Eigen::MatrixXd::Zero(rows, cols);
  adam_v = Eigen::MatrixXd::Zero(rows, cols);
}

void InitNormal(Parameter* p, double stddev, Rng* rng) {
  for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
    for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
      p->value(i, j) = rng->Normal() * stddev;
    }
  }
}

void AdamUpdate(const ParamRefs& params, const AdamConfig& config,
                int step_t) {
  if (step_t < 1) {
    throw Error("adam step counter must start at 1");
  }
  const double bc1 = 1.0 - std::pow(config.beta1, step_t);
  const double bc2 = 1.0 - std::pow(config.beta2, step_t);
  for (Parameter* p : params) {
    p->adam_m = config.beta1 * p->adam_m + (1.0 - config.beta1) * p->grad;
    p->adam_v.array() = config.beta2 * p->adam_v.array() +
                        (1.0 - config.beta2) * p->grad.array().square();
    const Eigen::ArrayXXd mhat = p->adam_m.array() / bc1;
    const Eigen::ArrayXXd vhat = p->adam_v.array() / bc2;
    p->value.array() -= config.lr * mhat / (vhat.sqrt() + config.eps);
  }
}

Linear::Linear(const std::string& name, int in_dim, int out_dim, Rng* rng) {
  weight.Init(name + ".weight", in_dim, out_dim);
  bias.Init(name + ".bias", 1, out_dim);
  InitNormal(&weight, 1.0 / std::sqrt(static_cast<double>(in_dim)), rng);
}

Eigen::MatrixXd Linear::Forward(const Eigen::MatrixXd& x, bool /*train*/) {
  x_ = x;
  return (x * weight.value).rowwise() + bias.value.row(0);
}

Eigen::MatrixXd Linear::Backward(const Eigen::MatrixXd& gy) {
  weight.grad += x_.transpose() * gy;
  bias.grad += gy.colwise().sum();
  return gy * weight.value.transpose();
}

void Linear::CollectParams(ParamRefs* out) {
  out->push_back(&weight);
  out->push_back(&bias);
}

LayerNorm::LayerNorm(const std::string& name, int dim) {
  gamma.Init(name + ".gamma", 1, dim);
  beta.Init(name + ".beta", 1, dim);
  gamma.value.setOnes();
}

Eigen::MatrixXd LayerNorm::Forward(const Eigen::MatrixXd& x, bool /*train*/) {
  const int dim = static_cast<int>(x.cols());
  xhat_.resize(x.rows(), dim);
  inv_std_.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const Eigen::RowVectorXd centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / dim;
    inv_std_[r] = 1.0 / std::sqrt(var + kEps);
    xhat_.row(r) = centered * inv_std_[r];
  }
  Eigen::MatrixXd y = xhat_;
  y.array().rowwise() *= gamma.value.row(0).array();
  y.rowwise() += beta.value.row(0);
  return y;
}

Eigen::MatrixXd LayerNorm::Backward(const Eigen::MatrixXd& gy) {
  const int dim = static_cast<int>(gy.cols());
  gamma.grad += (gy.array() * xhat_.array()).colwise().sum().matrix();
  beta.grad += gy.colwise().sum();
  Eigen::MatrixXd gx(gy.rows(), dim);
  for (Eigen::Index r = 0; r < gy.rows(); ++r) {
    const Eigen::RowVectorXd gxhat =
        gy.row(r).array() * gamma.value.row(0).array();
    const double sum_g = gxhat.sum();
    const double sum_gx = (gxhat.array() * xhat_.row(r).array()).sum();
    gx.row(r) = (inv_std_[r] / dim) *
                (dim * gxhat.array() - sum_g - xhat_.row(r).array() * sum_gx);
  }
  return gx;
}

void LayerNorm::CollectParams(ParamRefs* out) {
  out->push_back(&gamma);
  out->push_back(&beta);
}

Conv1d::Conv1d(const std::string& name, int in_dim, int out_dim, Rng* rng) {
  const double stddev = 1.0 / std::sqrt(3.0 * in_dim);
  for (int k = 0; k < 3; ++k) {
    taps[k].Init(name + ".tap" + std::to_string(k), in_dim, out_dim);
    InitNormal(&taps[k], stddev, rng);
  }
  bias.Init(name + ".bias", 1, out_dim);
}

namespace {

// Rows shifted by `offset` with zero fill: out[t] = x[t + offset].
Eigen::MatrixXd ShiftRows(const Eigen::MatrixXd& x, int offset) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  const Eigen::Index n = x.rows();
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Index s = t + offset;
    if (s >= 0 && s < n) out.row(t) = x.row(s);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd Conv1d::Forward(const Eigen::MatrixXd& x, bool /*train*/) {
  x_ = x;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), bias.value.cols());
  for (int k = 0; k < 3; ++k) {
    y += ShiftRows(x, k - 1) * taps[k].value;
  }
  return y.rowwise() + bias.value.row(0);
}

Eigen::MatrixXd Conv1d::Backward(const Eigen::MatrixXd& gy) {
  Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(x_.rows(), x_.cols());
  for (int k = 0; k < 3; ++k) {
    const int offset = k - 1;
    taps[k].grad += ShiftRows(x_, offset).transpose() * gy;
    gx += ShiftRows(gy, -offset) * taps[k].value.transpose();
  }
  bias.grad += gy.colwise().sum();
  return gx;
}

void Conv1d::CollectParams(ParamRefs* out) {
  for (int k = 0; k < 3; ++k) out->push_back(&taps[k]);
  out->push_back(&bias);
}

Eigen::MatrixXd Relu::Forward(const Eigen::MatrixXd& x, bool /*train*/) {
  mask_ = (x.array() > 0.0).cast<double>().matrix();
  return x.cwiseProduct(mask_);
}

Eigen::MatrixXd Relu::Backward(const Eigen::MatrixXd& gy) {
  return gy.cwiseProduct(mask_);
}

MultiHeadSelfAttention::MultiHeadSelfAttention(const std::string& name,
                                               int dim, int num_heads,
                                               Rng* rng)
    : dim_(dim), num_heads_(num_heads) {
  if (num_heads < 1 || dim % num_heads != 0) {
    throw Error("attention dim " + std::to_string(dim) +
                " not divisible by heads " + std::to_string(num_heads));
  }
  head_dim_ = dim / num_heads;
  const double stddev = 1.0 / std::sqrt(static_cast<double>(dim));
  const std::pair<Parameter*, const char*> weights[] = {
      {&wq, "wq"}, {&wk, "wk"}, {&wv, "wv"}, {&wo, "wo"}};
  for (const auto& [p, tag] : weights) {
    p->Init(name + "." + tag, dim, dim);
    InitNormal(p, stddev, rng);
  }
  const std::pair<Parameter*, const char*> biases[] = {
      {&bq, "bq"}, {&bk, "bk"}, {&bv, "bv"}, {&bo, "bo"}};
  for (const auto& [p, tag] : biases) {
    p->Init(name + "." + tag, 1, dim);
  }
}

Eigen::MatrixXd MultiHeadSelfAttention::Forward(const Eigen::MatrixXd& x,
                                                bool /*train*/) {
  x_ = x;
  q_ = (x * wq.value).rowwise() + bq.value.row(0);
  k_ = (x * wk.value).rowwise() + bk.value.row(0);
  v_ = (x * wv.value).rowwise() + bv.value.row(0);
  const Eigen::Index frames = x.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim_));
  concat_.resize(frames, dim_);
  attn_.assign(num_heads_, Eigen::MatrixXd());
  for (int h = 0; h < num_heads_; ++h) {
    const auto qh = q_.middleCols(h * head_dim_, head_dim_);
    const auto kh = k_.middleCols(h * head_dim_, head_dim_);
    const auto vh = v_.middleCols(h * head_dim_, head_dim_);
    Eigen::MatrixXd scores = (qh * kh.transpose()) * scale;
    for (Eigen::Index r = 0; r < frames; ++r) {
      const double m = scores.row(r).maxCoeff();
      const Eigen::RowVectorXd e = (scores.row(r).array() - m).exp();
      scores.row(r) = e / e.sum();
    }
    attn_[h] = scores;
    concat_.middleCols(h * head_dim_, head_dim_) = scores * vh;
  }
  return (concat_ * wo.value).rowwise() + bo.value.row(0);
}

Eigen::MatrixXd MultiHeadSelfAttention::Backward(const Eigen::MatrixXd& gy) {
  wo.grad += concat_.transpose() * gy;
  bo.grad += gy.colwise().sum();
  const Eigen::MatrixXd gconcat = gy * wo.value.transpose();

  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim_));
  Eigen::MatrixXd gq(q_.rows(), dim_), gk(k_.rows(), dim_),
      gv(v_.rows(), dim_);
  for (int h = 0; h < num_heads_; ++h) {
    const auto qh = q_.middleCols(h * head_dim_, head_dim_);
    const auto kh = k_.middleCols(h * head_dim_, head_dim_);
    const auto vh = v_.middleCols(h * head_dim_, head_dim_);
    const auto go = gconcat.middleCols(h * head_dim_, head_dim_);
    const Eigen::MatrixXd& p = attn_[h];
    const Eigen::MatrixXd gp = go * vh.transpose();
    // Row softmax backward: gs = p .* (gp - rowsum(gp .* p)).
    Eigen::MatrixXd gs(p.rows(), p.cols());
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      const double dot = gp.row(r).dot(p.row(r));
      gs.row(r) = p.row(r).array() * (gp.row(r).array() - dot);
    }
    gq.middleCols(h * head_dim_, head_dim_) = (gs * kh) * scale;
    gk.middleCols(h * head_dim_, head_dim_) = (gs.transpose() * qh) * scale;
    gv.middleCols(h * head_dim_, head_dim_) = p.transpose() * go;
  }

  wq.grad += x_.transpose() * gq;
  wk.grad += x_.transpose() * gk;
  wv.grad += x_.transpose() * gv;
  bq.grad += gq.colwise().sum();
  bk.grad += gk.colwise().sum();
  bv.grad += gv.colwise().sum();
  return gq * wq.value.transpose() + gk * wk.value.transpose() +
         gv * wv.value.transpose();
}

void MultiHeadSelfAttention::CollectParams(ParamRefs* out) {
  for (Parameter* p : {&wq, &wk, &wv, &wo, &bq, &bk, &bv, &bo}) {
    out->push_back(p);
  }
}

Dropout::Dropout(double rate, Rng* rng) : rate_(rate), rng_(rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw Error("dropout rate must be in [0, 1)");
  }
}

Eigen::MatrixXd Dropout::Forward(const Eigen::MatrixXd& x, bool train) {
  active_ = train && rate_ > 0.0 && rng_ != nullptr;
  if (!active_) return x;
  const double keep = 1.0 - rate_;
  mask_.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      mask_(i, j) = rng_->Uniform() < keep ? 1.0 / keep : 0.0;
    }
  }
  return x.cwiseProduct(mask_);
}

Eigen::MatrixXd Dropout::Backward(const Eigen::MatrixXd& gy) {
  if (!active_) return gy;
  return gy.cwiseProduct(mask_);
}

Eigen::MatrixXd PositionalEncoding::Table(int frames, int dim) {
  Eigen::MatrixXd pe(frames, dim);
  for (int t = 0; t < frames; ++t) {
    for (int j = 0; j < dim; ++j) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(j - (j % 2)) / dim);
      pe(t, j) = (j % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
    }
  }
  return pe;
}

Eigen::MatrixXd PositionalEncoding::Forward(const Eigen::MatrixXd& x,
                                            bool /*train*/) {
  return x + Table(static_cast<int>(x.rows()), static_cast<int>(x.cols()));
}

Eigen::MatrixXd PositionalEncoding::Backward(const Eigen::MatrixXd& gy) {
  return gy;
}

Eigen::MatrixXd Sequential::Forward(const Eigen::MatrixXd& x, bool train) {
  Eigen::MatrixXd h = x;
  for (auto& layer : layers_) h = layer->Forward(h, train);
  return h;
}

Eigen::MatrixXd Sequential::Backward(const Eigen::MatrixXd& gy) {
  Eigen::MatrixXd g = gy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = (*it)->Backward(g);
  }
  return g;
}

void Sequential::CollectParams(ParamRefs* out) {
  for (auto& layer : layers_) layer->CollectParams(out);
}

Residual::Residual(const std::string& name, int dim,
                   std::unique_ptr<Layer> inner, double dropout_rate,
                   Rng* rng)
    : norm_(name + ".norm", dim),
      inner_(std::move(inner)),
      dropout_(dropout_rate, rng) {}

Eigen::MatrixXd Residual::Forward(const Eigen::MatrixXd& x, bool train) {
  return x + dropout_.Forward(inner_->Forward(norm_.Forward(x, train), train),
                              train);
}

Eigen::MatrixXd Residual::Backward(const Eigen::MatrixXd& gy) {
  return gy + norm_.Backward(inner_->Backward(dropout_.Backward(gy)));
}

void Residual::CollectParams(ParamRefs* out) {
  norm_.CollectParams(out);
  inner_->CollectParams(out);
}

std::unique_ptr<Sequential> MakeBlockStack(const std::string& name,
                                           int num_blocks, int dim,
                                           int num_heads, double dropout_rate,
                                           Rng* rng) {
  auto stack = std::make_unique<Sequential>();
  for (int b = 0; b < num_blocks; ++b) {
    const std::string prefix = name + ".block" + std::to_string(b);
    stack->Add(std::make_unique<Residual>(
        prefix + ".attn", dim,
        std::make_unique<MultiHeadSelfAttention>(prefix + ".attn", dim,
                                                 num_heads, rng),
        dropout_rate, rng));
    auto ffn = std::make_unique<Sequential>();
    ffn->Add(std::make_unique<Conv1d>(prefix + ".ffn.conv0", dim, 2 * dim,
                                      rng));
    ffn->Add(std::make_unique<Relu>());
    ffn->Add(std::make_unique<Conv1d>(prefix + ".ffn.conv1", 2 * dim, dim,
                                      rng));
    stack->Add(std::make_unique<Residual>(prefix + ".ffn", dim,
                                          std::move(ffn), dropout_rate, rng));
  }
  return stack;
}

}  // namespace vshadow::s2s
