// include/dmtl/cli/config.h

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

#ifndef DMTL_CLI_CONFIG_H_
#define DMTL_CLI_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmtl/baselines/baselines.h"
#include "dmtl/corpus/split.h"
#include "dmtl/evaluation/analysis.h"
#include "dmtl/features/features.h"
#include "dmtl/model/mtl_model.h"
#include "dmtl/trainer/trainer.h"

namespace dmtl {

inline constexpr const char *kOutputRootEnv = "DMTL_OUTPUT_ROOT";
inline constexpr const char *kDefaultOutputRoot = "runs";

struct CorpusPaths {
  std::string roster;
  std::string manifest;
};

struct SplitSettings {
  SplitRatios ratios;
  std::uint64_t seed = 0;
  std::string plan;  // empty: ratio split
};

struct BaselineSettings {
  Family family = Family::kSvm;
  GridMetric metric = GridMetric::kMacroF1;
  nlohmann::json grid;  // hyperparameter -> candidate list; null selects the default grid
  std::uint64_t seed = 0;
};

// ModelConfig without the vocabulary, which is derived from the corpus.
struct ModelSettings {
  EncoderConfig encoder;
  bool ctc_head = true;
  std::uint64_t seed = 0;
};

struct EvaluateSettings {
  std::string checkpoint = "best";  // best | final
  std::string partition = "test";
};

struct AnalyzeSettings {
  std::string checkpoint = "final";
  std::vector<std::string> partitions = {"train", "valid", "test"};
  EmbeddingConfig embedding;
  int neighbours = 10;  // for the neighbour-overlap check
};

struct ExperimentConfig {
  CorpusPaths corpus;
  SplitSettings split;
  FeatureSetId features = FeatureSetId::kCombined;
  BaselineSettings baseline;
  ModelSettings model;
  TrainConfig train;
  EvaluateSettings evaluate;
  AnalyzeSettings analyze;
  std::string output_root;  // empty: $DMTL_OUTPUT_ROOT, then "runs"

  void Validate() const;
};

nlohmann::json ToJson(const ExperimentConfig &config);

// Keys missing from j keep their defaults; unknown keys are an error.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json &j);
ExperimentConfig LoadExperimentConfig(const std::string &path);

// Flag, then config, then environment, then the built-in default.
std::string ResolveOutputRoot(const ExperimentConfig &config);

// 16 hex digits of FNV-1a over the bytes.
std::string HashHex(std::string_view bytes);
std::string HashFile(const std::string &path);
std::string HashJson(const nlohmann::json &j);

ModelConfig MakeModelConfig(const ModelSettings &settings, int vocabulary_size);

}  // namespace dmtl

#endif  // DMTL_CLI_CONFIG_H_
