// include/dmtl/trainer/trainer.h

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

#ifndef DMTL_TRAINER_TRAINER_H_
#define DMTL_TRAINER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmtl/common/error.h"
#include "dmtl/model/mtl_model.h"

namespace dmtl {

struct TrainConfig {
  double lr = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  int batch_size = 4;
  int epochs = 100;
  int warmup_epochs = 0;  // e: CE is enabled from epoch index e (0-based)
  double alpha = 0.1;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables

  void Validate() const;
};

nlohmann::json ToJson(const TrainConfig &config);
TrainConfig TrainConfigFromJson(const nlohmann::json &j);

class TrainingError : public Error {
 public:
  using Error::Error;
};

struct AdamState {
  ParameterSet m, v;
  long long step = 0;
};

AdamState InitAdam(const ParameterSet &params);

// Bias-corrected Adam update. Throws TrainingError on a non-finite gradient
// before touching params or state.
void AdamStep(ParameterSet &params, const ParameterSet &grads, AdamState &state,
              const TrainConfig &config);

// Rescales grads so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
double ClipGlobalNorm(ParameterSet &grads, double max_norm);

struct EpochRecord {
  int epoch = 0;  // 1-indexed
  double train_ce = 0, train_ctc = 0, train_loss = 0;
  double valid_ce = 0, valid_ctc = 0, valid_loss = 0;
  double wall_seconds = 0;
  int skipped = 0;  // unalignable training utterances this epoch
};

struct TrainingCurves {
  std::vector<EpochRecord> epochs;

  std::vector<double> valid_loss() const;
  std::vector<double> valid_ce() const;
  void Validate() const;
};

// Tab-separated, one line per epoch.
void WriteCurves(const std::string &path, const TrainingCurves &curves);
TrainingCurves ReadCurves(const std::string &path);
nlohmann::json CurvesToJson(const TrainingCurves &curves);
TrainingCurves CurvesFromJson(const nlohmann::json &j);

// 1-indexed epoch minimising valid_loss among epochs k > warmup_epochs,
// ties to the earliest. Throws if no epoch is eligible.
int SelectBestEpoch(std::span<const double> valid_loss, int warmup_epochs);

struct TrainOptions {
  // Stop after this many completed epochs (for staged runs); -1 runs all.
  int stop_after = -1;
  std::ostream *log = nullptr;
  // When false, curves carry wall_seconds = 0 so reruns write identical bytes.
  bool record_wall_time = true;
  // Called after each completed epoch with the current parameters.
  std::function<void(int epoch, const MtlModel &model)> on_epoch;
};

struct TrainResult {
  ModelCheckpoint best;
  ModelCheckpoint final;  // also holds the resumable training state
  TrainingCurves curves;
  int best_epoch = 0;
  bool complete = false;
};

// Mean losses over a dataset, parameters untouched.
BatchLoss Evaluate(const MtlModel &model, std::span<const Example> data,
                   const LossWeights &weights);

TrainResult Train(MtlModel &model, std::span<const Example> train,
                  std::span<const Example> valid, const TrainConfig &config,
                  const TrainOptions &options = {});

// Continues from the final checkpoint of an interrupted run.
TrainResult Resume(const ModelCheckpoint &state, std::span<const Example> train,
                   std::span<const Example> valid, const TrainOptions &options = {});

}  // namespace dmtl

#endif  // DMTL_TRAINER_TRAINER_H_
