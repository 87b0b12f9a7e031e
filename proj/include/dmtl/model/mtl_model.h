// include/dmtl/model/mtl_model.h

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

#ifndef DMTL_MODEL_MTL_MODEL_H_
#define DMTL_MODEL_MTL_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dmtl/model/encoder.h"
#include "dmtl/model/losses.h"
#include "dmtl/model/parameters.h"

namespace dmtl {

// softmax(W h + b) over the five severity classes.
Eigen::VectorXd SeverityDistribution(const Eigen::VectorXd &pooled,
                                     const Eigen::MatrixXd &weight,
                                     const Eigen::MatrixXd &bias);

// Row-wise softmax(W h_t + b) over the valid frames of H.
Eigen::MatrixXd CtcFrameDistributions(const LatentSequence &h,
                                      const Eigen::MatrixXd &weight,
                                      const Eigen::MatrixXd &bias);

struct ModelConfig {
  EncoderConfig encoder;
  // ASR tokens; transcript id i maps to CTC output i + 1, output 0 is blank.
  std::vector<std::string> vocabulary;
  bool ctc_head = true;
  std::uint64_t seed = 0;  // head initialisation

  int ctc_outputs() const { return static_cast<int>(vocabulary.size()) + 1; }
};

nlohmann::json ToJson(const ModelConfig &config);
ModelConfig ModelConfigFromJson(const nlohmann::json &j);

// One supervised utterance. Either audio or precomputed latents must be set.
struct Example {
  const RawAudio *audio = nullptr;
  const LatentSequence *latents = nullptr;
  int severity = 0;
  const std::vector<int> *transcript = nullptr;  // vocabulary ids
};

struct LossWeights {
  double alpha = 0.1;
  bool ce_enabled = true;  // false during warmup
};

struct BatchLoss {
  double ce = 0.0;        // mean over used utterances
  double ctc = 0.0;       // mean over used utterances
  double combined = 0.0;  // mean of per-utterance combined losses
  int used = 0;
  int skipped = 0;        // unalignable for CTC
};

// Shared encoder with a mean-pooled severity head and a frame-wise CTC head.
class MtlModel {
 public:
  explicit MtlModel(const ModelConfig &config);
  MtlModel(const ModelConfig &config, ParameterSet params);

  const ModelConfig &config() const { return config_; }
  const ParameterSet &params() const { return params_; }
  ParameterSet &mutable_params() { return params_; }

  LatentSequence Encode(const RawAudio &audio) const;

  Eigen::VectorXd SeverityLogits(const Eigen::VectorXd &pooled) const;
  Eigen::VectorXd SeverityProbabilities(const LatentSequence &h) const;
  // Valid frames only; throws if the model has no CTC head.
  Eigen::MatrixXd CtcProbabilities(const LatentSequence &h) const;
  int PredictSeverity(const LatentSequence &h) const;

  // Batch-mean losses. When grads is non-null it is reset and receives the
  // gradient of the mean combined loss. Utterances whose transcript cannot be
  // aligned are skipped while the CTC term is active (alpha > 0).
  BatchLoss Compute(std::span<const Example> batch, const LossWeights &weights,
                    ParameterSet *grads) const;

  static constexpr const char *kSeverityWeight = "severity.weight";
  static constexpr const char *kSeverityBias = "severity.bias";
  static constexpr const char *kCtcWeight = "ctc.weight";
  static constexpr const char *kCtcBias = "ctc.bias";

 private:
  void Bind();
  LatentSequence EncodeExample(const Example &ex, ToyEncoder::Cache *cache) const;

  ModelConfig config_;
  ParameterSet params_;
  std::optional<ToyEncoder> toy_;
  std::size_t sev_w_ = 0, sev_b_ = 0, ctc_w_ = 0, ctc_b_ = 0;
};

// Versioned binary container: magic, format version, JSON metadata, then
// named float64 tensors (dims + row-major values) in named groups.
struct ModelCheckpoint {
  ModelConfig config;
  ParameterSet params;
  double alpha = 0.1;
  int warmup_epochs = 0;
  int epoch = 0;             // completed epochs
  nlohmann::json extra = nlohmann::json::object();
  std::vector<std::pair<std::string, ParameterSet>> extra_tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::string &path, const ModelCheckpoint &ckpt);
ModelCheckpoint LoadCheckpoint(const std::string &path);

}  // namespace dmtl

#endif  // DMTL_MODEL_MTL_MODEL_H_
