// include/dmtl/model/encoder.h

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

#ifndef DMTL_MODEL_ENCODER_H_
#define DMTL_MODEL_ENCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmtl/corpus/types.h"
#include "dmtl/model/parameters.h"

namespace dmtl {

// T x F latent frames. Rows at or beyond valid_length are padding.
struct LatentSequence {
  Eigen::MatrixXd values;
  Eigen::Index valid_length = 0;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

// Arithmetic mean of the first valid_length rows.
Eigen::VectorXd MeanPool(const LatentSequence &h);

enum class EncoderKind { kToy, kExternalAdapter };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kToy;
  int feature_dim = 64;  // F
  std::uint64_t seed = 0;

  // Toy encoder: two strided convolutions, then self-attention blocks.
  // Samples per latent step = conv1_stride * conv2_stride.
  int conv1_kernel = 40;
  int conv1_stride = 20;
  int conv1_channels = 32;
  int conv2_kernel = 16;
  int conv2_stride = 16;
  int attention_blocks = 2;
  int ffn_dim = 128;
  // Zero-mean, unit-variance scaling of the valid samples before conv1.
  bool normalize_input = true;

  // External adapter: executable invoked as `<command> <audio_in> <latents_out>`.
  std::string adapter_command;

  int downsampling() const { return conv1_stride * conv2_stride; }
  void Validate() const;
};

// Trainable convolution + self-attention encoder over raw samples.
//
// conv1: kernel x 1 -> conv1_channels, GELU
// conv2: conv2_kernel frames x conv1_channels -> F, GELU
// blocks: x += Attn(LN(x)); x += FFN(LN(x)), single-head attention with
//         padding rows masked out as keys, FFN = Linear-GELU-Linear.
//
// Latent step t covers samples [t*D, t*D + receptive field); samples past the
// end of the input read as zero, so T = ceil(L / D).
class ToyEncoder {
 public:
  explicit ToyEncoder(const EncoderConfig &config);

  // Adds this encoder's tensors ("encoder.*") to params, seeded from config.
  void InitParameters(ParameterSet *params) const;
  // Resolves tensor indices in an existing parameter set.
  void Bind(const ParameterSet &params);

  // Intermediate values kept for the backward pass.
  struct Cache;

  // `valid_samples` < samples.size() marks a zero-padded tail.
  LatentSequence Forward(const ParameterSet &params,
                         const std::vector<double> &samples,
                         std::size_t valid_samples, Cache *cache) const;
  LatentSequence Forward(const ParameterSet &params, const RawAudio &audio,
                         Cache *cache = nullptr) const {
    return Forward(params, audio.samples, audio.samples.size(), cache);
  }

  // Accumulates d loss / d params into grads given d loss / d H.
  void Backward(const ParameterSet &params, const Cache &cache,
                const Eigen::MatrixXd &grad_h, ParameterSet *grads) const;

  const EncoderConfig &config() const { return config_; }

 private:
  struct BlockIndices {
    std::size_t ln1_gain, ln1_bias, query_w, query_b, key_w, key_b, value_w,
        value_b, out_w, out_b, ln2_gain, ln2_bias, ffn_in_w, ffn_in_b,
        ffn_out_w, ffn_out_b;
  };
  EncoderConfig config_;
  std::size_t conv1_w_ = 0, conv1_b_ = 0, conv2_w_ = 0, conv2_b_ = 0;
  std::vector<BlockIndices> blocks_;
};

struct ToyEncoder::Cache {
  struct Block {
    Eigen::MatrixXd input, ln1_hat, ln1_out, ln1_inv_std, q, k, v, attn,
        context, mid, ln2_hat, ln2_out, ln2_inv_std, ffn_pre, ffn_act;
  };
  Eigen::MatrixXd patches1, pre1, act1, patches2, pre2;
  std::vector<Block> blocks;
  Eigen::Index valid_frames = 0;
};

// Exchange format for externally computed latents: little-endian int64 T,
// int64 F, then T*F float32 values in row-major order.
void WriteLatentFile(const std::string &path, const Eigen::MatrixXd &h);
Eigen::MatrixXd ReadLatentFile(const std::string &path);

// Audio handed to the adapter: little-endian int64 sample count, int64 sample
// rate, then float32 samples.
void WriteAudioExchangeFile(const std::string &path, const RawAudio &audio);
RawAudio ReadAudioExchangeFile(const std::string &path);

// Runs the configured adapter executable on one utterance and reads back H.
LatentSequence EncodeWithAdapter(const EncoderConfig &config,
                                 const RawAudio &audio);

}  // namespace dmtl

#endif  // DMTL_MODEL_ENCODER_H_
