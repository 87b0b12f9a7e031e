// src/model/toy_encoder.cc

// Copyright 2026  The dysarthria-mtl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include "dmtl/common/error.h"
#include "dmtl/common/rng.h"
#include "dmtl/model/encoder.h"

namespace dmtl {
namespace {

constexpr double kLayerNormEps = 1e-5;
const double kGeluC = std::sqrt(2.0 / 3.14159265358979323846);

// tanh-approximated GELU and its derivative.
Eigen::MatrixXd Gelu(const Eigen::MatrixXd &x) {
  Eigen::ArrayXXd a = x.array();
  Eigen::ArrayXXd th = (kGeluC * (a + 0.044715 * a.cube())).tanh();
  return (0.5 * a * (1.0 + th)).matrix();
}

Eigen::MatrixXd GeluGrad(const Eigen::MatrixXd &x) {
  Eigen::ArrayXXd a = x.array();
  Eigen::ArrayXXd th = (kGeluC * (a + 0.044715 * a.cube())).tanh();
  return (0.5 * (1.0 + th) +
          0.5 * a * (1.0 - th.square()) * kGeluC * (1.0 + 3.0 * 0.044715 * a.square()))
      .matrix();
}

// y = x W^T + 1 b^T with W out x in and b out x 1.
Eigen::MatrixXd Linear(const Eigen::MatrixXd &x, const Eigen::MatrixXd &w,
                       const Eigen::MatrixXd &b) {
  Eigen::MatrixXd y = x * w.transpose();
  y.rowwise() += b.col(0).transpose();
  return y;
}

void LinearBackward(const Eigen::MatrixXd &x, const Eigen::MatrixXd &grad_y,
                    Eigen::MatrixXd *grad_w, Eigen::MatrixXd *grad_b) {
  grad_w->noalias() += grad_y.transpose() * x;
  grad_b->col(0) += grad_y.colwise().sum().transpose();
}

// Row-wise layer normalisation; returns gain * hat + bias.
Eigen::MatrixXd LayerNorm(const Eigen::MatrixXd &x, const Eigen::MatrixXd &gain,
                          const Eigen::MatrixXd &bias, Eigen::MatrixXd *hat,
                          Eigen::MatrixXd *inv_std) {
  const auto n = x.cols();
  *hat = Eigen::MatrixXd(x.rows(), n);
  *inv_std = Eigen::MatrixXd(x.rows(), 1);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    double mean = x.row(t).mean();
    double var = (x.row(t).array() - mean).square().sum() / n;
    double is = 1.0 / std::sqrt(var + kLayerNormEps);
    (*inv_std)(t, 0) = is;
    hat->row(t) = (x.row(t).array() - mean) * is;
  }
  Eigen::MatrixXd y = hat->array().rowwise() * gain.col(0).transpose().array();
  y.rowwise() += bias.col(0).transpose();
  return y;
}

Eigen::MatrixXd LayerNormBackward(const Eigen::MatrixXd &grad_y,
                                  const Eigen::MatrixXd &hat,
                                  const Eigen::MatrixXd &inv_std,
                                  const Eigen::MatrixXd &gain,
                                  Eigen::MatrixXd *grad_gain,
                                  Eigen::MatrixXd *grad_bias) {
  grad_gain->col(0) += (grad_y.array() * hat.array()).colwise().sum().transpose().matrix();
  grad_bias->col(0) += grad_y.colwise().sum().transpose();
  Eigen::MatrixXd grad_hat = grad_y.array().rowwise() * gain.col(0).transpose().array();
  Eigen::MatrixXd grad_x(grad_y.rows(), grad_y.cols());
  for (Eigen::Index t = 0; t < grad_y.rows(); ++t) {
    double m1 = grad_hat.row(t).mean();
    double m2 = (grad_hat.row(t).array() * hat.row(t).array()).mean();
    grad_x.row(t) = inv_std(t, 0) *
                    (grad_hat.row(t).array() - m1 - hat.row(t).array() * m2);
  }
  return grad_x;
}

Eigen::MatrixXd GaussianInit(Eigen::Index rows, Eigen::Index cols, double stddev,
                             std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = stddev * Gaussian(rng);
  return m;
}

}  // namespace

void EncoderConfig::Validate() const {
  if (feature_dim < 1) throw Error("encoder feature_dim must be >= 1");
  if (kind == EncoderKind::kExternalAdapter) {
    if (adapter_command.empty()) throw Error("external adapter needs a command");
    return;
  }
  if (conv1_kernel < 1 || conv1_stride < 1 || conv1_channels < 1 ||
      conv2_kernel < 1 || conv2_stride < 1 || attention_blocks < 0 || ffn_dim < 1)
    throw Error("invalid toy encoder dimensions");
}

Eigen::VectorXd MeanPool(const LatentSequence &h) {
  if (h.valid_length < 1) throw Error("mean pooling needs valid_length >= 1");
  if (h.valid_length > h.frames()) throw DimensionError("valid_length exceeds frame count");
  return h.values.topRows(h.valid_length).colwise().mean().transpose();
}

ToyEncoder::ToyEncoder(const EncoderConfig &config) : config_(config) {
  config_.Validate();
  if (config_.kind != EncoderKind::kToy) throw Error("ToyEncoder requires kind toy");
}

void ToyEncoder::InitParameters(ParameterSet *params) const {
  const int F = config_.feature_dim, C1 = config_.conv1_channels;
  const int K1 = config_.conv1_kernel, K2 = config_.conv2_kernel * C1;
  auto init = [&](const std::string &name, Eigen::Index rows, Eigen::Index cols,
                  double stddev) {
    params->Add(name, GaussianInit(rows, cols, stddev, DeriveSeed(config_.seed, name)));
  };
  auto zeros = [&](const std::string &name, Eigen::Index rows) {
    params->Add(name, Eigen::MatrixXd::Zero(rows, 1));
  };
  auto ones = [&](const std::string &name, Eigen::Index rows) {
    params->Add(name, Eigen::MatrixXd::Ones(rows, 1));
  };
  init("encoder.conv1.weight", C1, K1, 1.0 / std::sqrt(static_cast<double>(K1)));
  zeros("encoder.conv1.bias", C1);
  init("encoder.conv2.weight", F, K2, 1.0 / std::sqrt(static_cast<double>(K2)));
  zeros("encoder.conv2.bias", F);
  const double sf = 1.0 / std::sqrt(static_cast<double>(F));
  const double sh = 1.0 / std::sqrt(static_cast<double>(config_.ffn_dim));
  for (int b = 0; b < config_.attention_blocks; ++b) {
    std::string p = "encoder.block" + std::to_string(b) + ".";
    ones(p + "ln1.gain", F);
    zeros(p + "ln1.bias", F);
    init(p + "attn.query.weight", F, F, sf);
    zeros(p + "attn.query.bias", F);
    init(p + "attn.key.weight", F, F, sf);
    zeros(p + "attn.key.bias", F);
    init(p + "attn.value.weight", F, F, sf);
    zeros(p + "attn.value.bias", F);
    init(p + "attn.out.weight", F, F, sf);
    zeros(p + "attn.out.bias", F);
    ones(p + "ln2.gain", F);
    zeros(p + "ln2.bias", F);
    init(p + "ffn.in.weight", config_.ffn_dim, F, sf);
    zeros(p + "ffn.in.bias", config_.ffn_dim);
    init(p + "ffn.out.weight", F, config_.ffn_dim, sh);
    zeros(p + "ffn.out.bias", F);
  }
}

void ToyEncoder::Bind(const ParameterSet &params) {
  conv1_w_ = params.Index("encoder.conv1.weight");
  conv1_b_ = params.Index("encoder.conv1.bias");
  conv2_w_ = params.Index("encoder.conv2.weight");
  conv2_b_ = params.Index("encoder.conv2.bias");
  if (params[conv1_w_].rows() != config_.conv1_channels ||
      params[conv1_w_].cols() != config_.conv1_kernel ||
      params[conv2_w_].rows() != config_.feature_dim ||
      params[conv2_w_].cols() != config_.conv2_kernel * config_.conv1_channels)
    throw DimensionError("encoder parameters do not match the encoder config");
  blocks_.clear();
  for (int b = 0; b < config_.attention_blocks; ++b) {
    std::string p = "encoder.block" + std::to_string(b) + ".";
    BlockIndices ix;
    ix.ln1_gain = params.Index(p + "ln1.gain");
    ix.ln1_bias = params.Index(p + "ln1.bias");
    ix.query_w = params.Index(p + "attn.query.weight");
    ix.query_b = params.Index(p + "attn.query.bias");
    ix.key_w = params.Index(p + "attn.key.weight");
    ix.key_b = params.Index(p + "attn.key.bias");
    ix.value_w = params.Index(p + "attn.value.weight");
    ix.value_b = params.Index(p + "attn.value.bias");
    ix.out_w = params.Index(p + "attn.out.weight");
    ix.out_b = params.Index(p + "attn.out.bias");
    ix.ln2_gain = params.Index(p + "ln2.gain");
    ix.ln2_bias = params.Index(p + "ln2.bias");
    ix.ffn_in_w = params.Index(p + "ffn.in.weight");
    ix.ffn_in_b = params.Index(p + "ffn.in.bias");
    ix.ffn_out_w = params.Index(p + "ffn.out.weight");
    ix.ffn_out_b = params.Index(p + "ffn.out.bias");
    blocks_.push_back(ix);
  }
}

LatentSequence ToyEncoder::Forward(const ParameterSet &params,
                                   const std::vector<double> &samples,
                                   std::size_t valid_samples, Cache *cache) const {
  const Eigen::Index D = config_.downsampling();
  const Eigen::Index s1 = config_.conv1_stride, k1 = config_.conv1_kernel;
  const Eigen::Index s2 = config_.conv2_stride, k2 = config_.conv2_kernel;
  const Eigen::Index C1 = config_.conv1_channels;
  const auto total = static_cast<Eigen::Index>(samples.size());
  const auto valid = static_cast<Eigen::Index>(valid_samples);
  if (valid > total) throw DimensionError("valid_samples exceeds the sample count");
  if (valid < D)
    throw Error("audio of " + std::to_string(valid) +
                " samples is shorter than one encoder window of " + std::to_string(D));
  const Eigen::Index T = (total + D - 1) / D;
  const Eigen::Index Tv = (valid + D - 1) / D;
  const Eigen::Index N1 = (T - 1) * s2 + k2;

  Cache local;
  Cache &c = cache ? *cache : local;
  c.valid_frames = Tv;

  double shift = 0.0, gain = 1.0;
  if (config_.normalize_input) {
    double mean = 0.0, var = 0.0;
    for (Eigen::Index i = 0; i < valid; ++i) mean += samples[i];
    mean /= static_cast<double>(valid);
    for (Eigen::Index i = 0; i < valid; ++i) var += (samples[i] - mean) * (samples[i] - mean);
    var /= static_cast<double>(valid);
    shift = mean;
    gain = 1.0 / std::sqrt(var + 1e-7);
  }
  // Samples past valid_samples are padding and read as zero.
  c.patches1.resize(N1, k1);
  for (Eigen::Index n = 0; n < N1; ++n)
    for (Eigen::Index i = 0; i < k1; ++i) {
      Eigen::Index idx = n * s1 + i;
      c.patches1(n, i) = idx < valid ? (samples[idx] - shift) * gain : 0.0;
    }
  c.pre1 = Linear(c.patches1, params[conv1_w_], params[conv1_b_]);
  c.act1 = Gelu(c.pre1);

  c.patches2.resize(T, k2 * C1);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index j = 0; j < k2; ++j)
      c.patches2.block(t, j * C1, 1, C1) = c.act1.row(t * s2 + j);
  c.pre2 = Linear(c.patches2, params[conv2_w_], params[conv2_b_]);
  Eigen::MatrixXd x = Gelu(c.pre2);

  const double scale = 1.0 / std::sqrt(static_cast<double>(config_.feature_dim));
  c.blocks.resize(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const BlockIndices &ix = blocks_[b];
    Cache::Block &cb = c.blocks[b];
    cb.input = x;
    cb.ln1_out = LayerNorm(x, params[ix.ln1_gain], params[ix.ln1_bias], &cb.ln1_hat,
                           &cb.ln1_inv_std);
    cb.q = Linear(cb.ln1_out, params[ix.query_w], params[ix.query_b]);
    cb.k = Linear(cb.ln1_out, params[ix.key_w], params[ix.key_b]);
    cb.v = Linear(cb.ln1_out, params[ix.value_w], params[ix.value_b]);
    // Scores against valid keys only; padded keys get zero weight.
    Eigen::MatrixXd scores = scale * (cb.q * cb.k.topRows(Tv).transpose());
    cb.attn = Eigen::MatrixXd::Zero(T, T);
    for (Eigen::Index t = 0; t < T; ++t) {
      double m = scores.row(t).maxCoeff();
      Eigen::RowVectorXd e = (scores.row(t).array() - m).exp();
      cb.attn.row(t).head(Tv) = e / e.sum();
    }
    cb.context = cb.attn * cb.v;
    cb.mid = x + Linear(cb.context, params[ix.out_w], params[ix.out_b]);
    cb.ln2_out = LayerNorm(cb.mid, params[ix.ln2_gain], params[ix.ln2_bias], &cb.ln2_hat,
                           &cb.ln2_inv_std);
    cb.ffn_pre = Linear(cb.ln2_out, params[ix.ffn_in_w], params[ix.ffn_in_b]);
    cb.ffn_act = Gelu(cb.ffn_pre);
    x = cb.mid + Linear(cb.ffn_act, params[ix.ffn_out_w], params[ix.ffn_out_b]);
  }
  return LatentSequence{std::move(x), Tv};
}

void ToyEncoder::Backward(const ParameterSet &params, const Cache &c,
                          const Eigen::MatrixXd &grad_h, ParameterSet *grads) const {
  const double scale = 1.0 / std::sqrt(static_cast<double>(config_.feature_dim));
  const Eigen::Index Tv = c.valid_frames;
  Eigen::MatrixXd dx = grad_h;
  for (std::size_t bi = blocks_.size(); bi-- > 0;) {
    const BlockIndices &ix = blocks_[bi];
    const Cache::Block &cb = c.blocks[bi];
    ParameterSet &g = *grads;

    // x_out = mid + FFN(LN2(mid))
    Eigen::MatrixXd dmid = dx;
    LinearBackward(cb.ffn_act, dx, &g[ix.ffn_out_w], &g[ix.ffn_out_b]);
    Eigen::MatrixXd dpre =
        (dx * params[ix.ffn_out_w]).cwiseProduct(GeluGrad(cb.ffn_pre));
    LinearBackward(cb.ln2_out, dpre, &g[ix.ffn_in_w], &g[ix.ffn_in_b]);
    Eigen::MatrixXd dln2 = dpre * params[ix.ffn_in_w];
    dmid += LayerNormBackward(dln2, cb.ln2_hat, cb.ln2_inv_std, params[ix.ln2_gain],
                              &g[ix.ln2_gain], &g[ix.ln2_bias]);

    // mid = input + Attn(LN1(input)) W_o^T + b_o
    Eigen::MatrixXd dinput = dmid;
    LinearBackward(cb.context, dmid, &g[ix.out_w], &g[ix.out_b]);
    Eigen::MatrixXd dcontext = dmid * params[ix.out_w];
    Eigen::MatrixXd dattn = dcontext * cb.v.transpose();
    Eigen::MatrixXd dv = cb.attn.transpose() * dcontext;
    Eigen::MatrixXd dscores(cb.attn.rows(), Tv);
    for (Eigen::Index t = 0; t < cb.attn.rows(); ++t) {
      auto a = cb.attn.row(t).head(Tv).array();
      auto da = dattn.row(t).head(Tv).array();
      dscores.row(t) = a * (da - (da * a).sum());
    }
    dscores *= scale;
    Eigen::MatrixXd dq = dscores * cb.k.topRows(Tv);
    Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(cb.k.rows(), cb.k.cols());
    dk.topRows(Tv) = dscores.transpose() * cb.q;
    LinearBackward(cb.ln1_out, dq, &g[ix.query_w], &g[ix.query_b]);
    LinearBackward(cb.ln1_out, dk, &g[ix.key_w], &g[ix.key_b]);
    LinearBackward(cb.ln1_out, dv, &g[ix.value_w], &g[ix.value_b]);
    Eigen::MatrixXd dln1 = dq * params[ix.query_w] + dk * params[ix.key_w] +
                           dv * params[ix.value_w];
    dinput += LayerNormBackward(dln1, cb.ln1_hat, cb.ln1_inv_std, params[ix.ln1_gain],
                                &g[ix.ln1_gain], &g[ix.ln1_bias]);
    dx = std::move(dinput);
  }

  const Eigen::Index s2 = config_.conv2_stride, k2 = config_.conv2_kernel;
  const Eigen::Index C1 = config_.conv1_channels;
  Eigen::MatrixXd dpre2 = dx.cwiseProduct(GeluGrad(c.pre2));
  LinearBackward(c.patches2, dpre2, &(*grads)[conv2_w_], &(*grads)[conv2_b_]);
  Eigen::MatrixXd dpatches2 = dpre2 * params[conv2_w_];
  Eigen::MatrixXd dact1 = Eigen::MatrixXd::Zero(c.act1.rows(), c.act1.cols());
  for (Eigen::Index t = 0; t < dpatches2.rows(); ++t)
    for (Eigen::Index j = 0; j < k2; ++j)
      dact1.row(t * s2 + j) += dpatches2.block(t, j * C1, 1, C1);
  Eigen::MatrixXd dpre1 = dact1.cwiseProduct(GeluGrad(c.pre1));
  LinearBackward(c.patches1, dpre1, &(*grads)[conv1_w_], &(*grads)[conv1_b_]);
}

}  // namespace dmtl
