// src/model/mtl_model.cc

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

#include "dmtl/model/mtl_model.h"

#include <cmath>

#include "dmtl/common/error.h"
#include "dmtl/common/rng.h"
#include "dmtl/corpus/types.h"

namespace dmtl {
namespace {

Eigen::MatrixXd HeadInit(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(cols));
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = stddev * Gaussian(rng);
  return m;
}

const char *KindName(EncoderKind k) {
  return k == EncoderKind::kToy ? "toy" : "external-adapter";
}

}  // namespace

Eigen::VectorXd SeverityDistribution(const Eigen::VectorXd &pooled,
                                     const Eigen::MatrixXd &weight,
                                     const Eigen::MatrixXd &bias) {
  if (weight.cols() != pooled.size() || bias.rows() != weight.rows() || bias.cols() != 1)
    throw DimensionError("severity head does not match the pooled vector");
  return Softmax(weight * pooled + bias.col(0));
}

Eigen::MatrixXd CtcFrameDistributions(const LatentSequence &h,
                                      const Eigen::MatrixXd &weight,
                                      const Eigen::MatrixXd &bias) {
  if (weight.cols() != h.dim() || bias.rows() != weight.rows() || bias.cols() != 1)
    throw DimensionError("CTC head does not match the latent dimension");
  Eigen::MatrixXd logits = h.values.topRows(h.valid_length) * weight.transpose();
  logits.rowwise() += bias.col(0).transpose();
  return LogSoftmaxRows(logits).array().exp();
}

nlohmann::json ToJson(const ModelConfig &c) {
  const EncoderConfig &e = c.encoder;
  return {{"encoder",
           {{"kind", KindName(e.kind)},
            {"feature_dim", e.feature_dim},
            {"seed", e.seed},
            {"conv1_kernel", e.conv1_kernel},
            {"conv1_stride", e.conv1_stride},
            {"conv1_channels", e.conv1_channels},
            {"conv2_kernel", e.conv2_kernel},
            {"conv2_stride", e.conv2_stride},
            {"attention_blocks", e.attention_blocks},
            {"ffn_dim", e.ffn_dim},
            {"normalize_input", e.normalize_input},
            {"adapter_command", e.adapter_command}}},
          {"vocabulary", c.vocabulary},
          {"ctc_head", c.ctc_head},
          {"seed", c.seed}};
}

ModelConfig ModelConfigFromJson(const nlohmann::json &j) {
  ModelConfig c;
  const auto &e = j.at("encoder");
  std::string kind = e.at("kind").get<std::string>();
  if (kind == "toy") c.encoder.kind = EncoderKind::kToy;
  else if (kind == "external-adapter") c.encoder.kind = EncoderKind::kExternalAdapter;
  else throw Error("unknown encoder kind '" + kind + "'");
  c.encoder.feature_dim = e.at("feature_dim").get<int>();
  c.encoder.seed = e.at("seed").get<std::uint64_t>();
  c.encoder.conv1_kernel = e.at("conv1_kernel").get<int>();
  c.encoder.conv1_stride = e.at("conv1_stride").get<int>();
  c.encoder.conv1_channels = e.at("conv1_channels").get<int>();
  c.encoder.conv2_kernel = e.at("conv2_kernel").get<int>();
  c.encoder.conv2_stride = e.at("conv2_stride").get<int>();
  c.encoder.attention_blocks = e.at("attention_blocks").get<int>();
  c.encoder.ffn_dim = e.at("ffn_dim").get<int>();
  c.encoder.normalize_input = e.at("normalize_input").get<bool>();
  c.encoder.adapter_command = e.at("adapter_command").get<std::string>();
  c.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  c.ctc_head = j.at("ctc_head").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

MtlModel::MtlModel(const ModelConfig &config) : config_(config) {
  config_.encoder.Validate();
  if (config_.encoder.kind == EncoderKind::kToy) {
    ToyEncoder(config_.encoder).InitParameters(&params_);
  }
  const int F = config_.encoder.feature_dim;
  params_.Add(kSeverityWeight, HeadInit(kNumSeverityClasses, F,
                                        DeriveSeed(config_.seed, kSeverityWeight)));
  params_.Add(kSeverityBias, Eigen::MatrixXd::Zero(kNumSeverityClasses, 1));
  if (config_.ctc_head) {
    params_.Add(kCtcWeight, HeadInit(config_.ctc_outputs(), F,
                                     DeriveSeed(config_.seed, kCtcWeight)));
    params_.Add(kCtcBias, Eigen::MatrixXd::Zero(config_.ctc_outputs(), 1));
  }
  Bind();
}

MtlModel::MtlModel(const ModelConfig &config, ParameterSet params)
    : config_(config), params_(std::move(params)) {
  config_.encoder.Validate();
  Bind();
}

void MtlModel::Bind() {
  const int F = config_.encoder.feature_dim;
  if (config_.encoder.kind == EncoderKind::kToy) {
    toy_.emplace(config_.encoder);
    toy_->Bind(params_);
  }
  sev_w_ = params_.Index(kSeverityWeight);
  sev_b_ = params_.Index(kSeverityBias);
  if (params_[sev_w_].rows() != kNumSeverityClasses || params_[sev_w_].cols() != F ||
      params_[sev_b_].rows() != kNumSeverityClasses || params_[sev_b_].cols() != 1)
    throw DimensionError("severity head shape does not match F");
  if (config_.ctc_head) {
    ctc_w_ = params_.Index(kCtcWeight);
    ctc_b_ = params_.Index(kCtcBias);
    if (params_[ctc_w_].rows() != config_.ctc_outputs() || params_[ctc_w_].cols() != F ||
        params_[ctc_b_].rows() != config_.ctc_outputs())
      throw DimensionError("CTC head shape does not match vocabulary and F");
  }
}

LatentSequence MtlModel::Encode(const RawAudio &audio) const {
  if (toy_) return toy_->Forward(params_, audio);
  return EncodeWithAdapter(config_.encoder, audio);
}

LatentSequence MtlModel::EncodeExample(const Example &ex, ToyEncoder::Cache *cache) const {
  if (ex.latents) {
    if (toy_ && cache) throw Error("precomputed latents cannot be trained through");
    return *ex.latents;
  }
  if (!ex.audio) throw Error("example has neither audio nor latents");
  if (toy_) return toy_->Forward(params_, *ex.audio, cache);
  return EncodeWithAdapter(config_.encoder, *ex.audio);
}

Eigen::VectorXd MtlModel::SeverityLogits(const Eigen::VectorXd &pooled) const {
  if (pooled.size() != params_[sev_w_].cols())
    throw DimensionError("pooled vector has the wrong dimension");
  return params_[sev_w_] * pooled + params_[sev_b_].col(0);
}

Eigen::VectorXd MtlModel::SeverityProbabilities(const LatentSequence &h) const {
  return SeverityDistribution(MeanPool(h), params_[sev_w_], params_[sev_b_]);
}

Eigen::MatrixXd MtlModel::CtcProbabilities(const LatentSequence &h) const {
  if (!config_.ctc_head) throw Error("model has no CTC head");
  return CtcFrameDistributions(h, params_[ctc_w_], params_[ctc_b_]);
}

int MtlModel::PredictSeverity(const LatentSequence &h) const {
  Eigen::Index best;
  SeverityLogits(MeanPool(h)).maxCoeff(&best);
  return static_cast<int>(best);
}

BatchLoss MtlModel::Compute(std::span<const Example> batch, const LossWeights &weights,
                            ParameterSet *grads) const {
  if (weights.alpha < 0.0) throw Error("alpha must be non-negative");
  if (grads) {
    if (!grads->SameLayout(params_)) *grads = params_.ZerosLike();
    else grads->SetZero();
  }
  const bool use_ctc = config_.ctc_head && weights.alpha > 0.0;
  BatchLoss out;
  ToyEncoder::Cache cache;
  for (const Example &ex : batch) {
    if (ex.severity < 0 || ex.severity >= kNumSeverityClasses)
      throw Error("severity label out of range");
    LatentSequence h = EncodeExample(ex, grads && toy_ ? &cache : nullptr);
    const Eigen::Index Tv = h.valid_length;

    std::vector<int> target;
    if (config_.ctc_head) {
      if (!ex.transcript) throw Error("CTC head needs a transcript");
      for (int id : *ex.transcript) {
        if (id < 0 || id >= static_cast<int>(config_.vocabulary.size()))
          throw Error("transcript token " + std::to_string(id) + " outside the vocabulary");
        target.push_back(id + 1);
      }
      if (Tv < MinimumCtcFrames(target)) {
        if (use_ctc) {
          ++out.skipped;
          continue;
        }
      }
    }

    Eigen::VectorXd pooled = MeanPool(h);
    Eigen::VectorXd logits = SeverityLogits(pooled);
    Eigen::VectorXd log_p = LogSoftmax(logits);
    double ce = -log_p[ex.severity];

    double ctc = 0.0;
    CtcResult ctc_result;
    Eigen::MatrixXd ctc_logits;
    if (config_.ctc_head && Tv >= MinimumCtcFrames(target)) {
      ctc_logits = h.values.topRows(Tv) * params_[ctc_w_].transpose();
      ctc_logits.rowwise() += params_[ctc_b_].col(0).transpose();
      ctc_result = CtcForwardBackward(LogSoftmaxRows(ctc_logits), target,
                                      grads != nullptr && use_ctc);
      ctc = ctc_result.loss;
    }

    out.ce += ce;
    out.ctc += ctc;
    out.combined += (weights.ce_enabled ? ce : 0.0) + weights.alpha * ctc;
    ++out.used;

    if (!grads) continue;
    ParameterSet &g = *grads;
    Eigen::MatrixXd grad_h = Eigen::MatrixXd::Zero(h.frames(), h.dim());
    if (weights.ce_enabled) {
      Eigen::VectorXd dlogits = log_p.array().exp();
      dlogits[ex.severity] -= 1.0;
      g[sev_w_].noalias() += dlogits * pooled.transpose();
      g[sev_b_].col(0) += dlogits;
      Eigen::RowVectorXd dpooled = (params_[sev_w_].transpose() * dlogits).transpose();
      grad_h.topRows(Tv).rowwise() += dpooled / static_cast<double>(Tv);
    }
    if (use_ctc) {
      Eigen::MatrixXd dz = weights.alpha * ctc_result.grad_logits;
      g[ctc_w_].noalias() += dz.transpose() * h.values.topRows(Tv);
      g[ctc_b_].col(0) += dz.colwise().sum().transpose();
      grad_h.topRows(Tv).noalias() += dz * params_[ctc_w_];
    }
    if (toy_ && !ex.latents) toy_->Backward(params_, cache, grad_h, grads);
  }
  if (out.used > 0) {
    double inv = 1.0 / out.used;
    out.ce *= inv;
    out.ctc *= inv;
    out.combined *= inv;
    if (grads) grads->Scale(inv);
  }
  return out;
}

}  // namespace dmtl
