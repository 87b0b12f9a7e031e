// src/trainer/trainer.cc

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

#include "dmtl/trainer/trainer.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "dmtl/common/rng.h"
#include "dmtl/common/strings.h"

namespace dmtl {

void TrainConfig::Validate() const {
  if (!(lr > 0.0)) throw ValidationError("lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ValidationError("Adam betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
  if (epochs < 1) throw ValidationError("epochs must be at least 1");
  if (warmup_epochs < 0 || warmup_epochs > epochs)
    throw ValidationError("warmup epochs must lie in [0, epochs]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be >= 0");
}

nlohmann::json ToJson(const TrainConfig &c) {
  return {{"lr", c.lr},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"eps", c.eps},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"warmup_epochs", c.warmup_epochs},
          {"alpha", c.alpha},
          {"seed", c.seed},
          {"clip_norm", c.clip_norm}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json &j) {
  TrainConfig c;
  for (const auto &[key, value] : j.items()) {
    if (key == "lr") c.lr = value.get<double>();
    else if (key == "beta1") c.beta1 = value.get<double>();
    else if (key == "beta2") c.beta2 = value.get<double>();
    else if (key == "eps") c.eps = value.get<double>();
    else if (key == "batch_size") c.batch_size = value.get<int>();
    else if (key == "epochs") c.epochs = value.get<int>();
    else if (key == "warmup_epochs") c.warmup_epochs = value.get<int>();
    else if (key == "alpha") c.alpha = value.get<double>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "clip_norm") c.clip_norm = value.get<double>();
    else throw ValidationError("unknown training option '" + key + "'");
  }
  c.Validate();
  return c;
}

BatchLoss Evaluate(const MtlModel &model, std::span<const Example> data,
                   const LossWeights &weights) {
  return model.Compute(data, weights, nullptr);
}

namespace {

struct LoopState {
  TrainConfig config;
  AdamState adam;
  TrainingCurves curves;
  ParameterSet best_params;
  int best_epoch = 0;
  double best_loss = std::numeric_limits<double>::infinity();
};

ModelCheckpoint StateCheckpoint(const MtlModel &model, const LoopState &s) {
  ModelCheckpoint c;
  c.config = model.config();
  c.params = model.params();
  c.alpha = s.config.alpha;
  c.warmup_epochs = s.config.warmup_epochs;
  c.epoch = static_cast<int>(s.curves.epochs.size());
  c.extra = {{"train_config", ToJson(s.config)},
             {"adam_step", s.adam.step},
             {"best_epoch", s.best_epoch},
             {"curves", CurvesToJson(s.curves)}};
  if (!s.curves.epochs.empty()) c.extra["valid_loss"] = s.curves.epochs.back().valid_loss;
  c.extra_tensors.emplace_back("adam.m", s.adam.m);
  c.extra_tensors.emplace_back("adam.v", s.adam.v);
  if (s.best_epoch > 0) c.extra_tensors.emplace_back("best", s.best_params);
  return c;
}

void CheckData(std::span<const Example> train, std::span<const Example> valid) {
  if (train.empty()) throw TrainingError("training partition is empty");
  if (valid.empty()) throw TrainingError("validation partition is empty");
}

TrainResult RunLoop(MtlModel &model, LoopState &s, std::span<const Example> train,
                    std::span<const Example> valid, const TrainOptions &options) {
  const TrainConfig &cfg = s.config;
  if (cfg.alpha > 0.0 && !model.config().ctc_head)
    throw TrainingError("alpha > 0 needs a model with a CTC head");
  const int stop = options.stop_after < 0 ? cfg.epochs
                                          : std::min(cfg.epochs, options.stop_after);
  ParameterSet grads = model.params().ZerosLike();
  std::vector<std::size_t> order(train.size());
  std::vector<Example> batch;

  for (int epoch = static_cast<int>(s.curves.epochs.size()); epoch < stop; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const LossWeights weights{cfg.alpha, epoch >= cfg.warmup_epochs};

    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(DeriveSeed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    Shuffle(order.begin(), order.end(), rng);

    EpochRecord rec;
    rec.epoch = epoch + 1;
    int used = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      batch.clear();
      for (std::size_t i = b; i < std::min(order.size(), b + cfg.batch_size); ++i)
        batch.push_back(train[order[i]]);
      BatchLoss loss = model.Compute(batch, weights, &grads);
      rec.skipped += loss.skipped;
      if (loss.used == 0)
        throw TrainingError("epoch " + std::to_string(epoch + 1) + ": every utterance in batch " +
                            std::to_string(b / cfg.batch_size + 1) +
                            " is too short for its transcript");
      ClipGlobalNorm(grads, cfg.clip_norm);
      try {
        AdamStep(model.mutable_params(), grads, s.adam, cfg);
      } catch (const TrainingError &e) {
        throw TrainingError("epoch " + std::to_string(epoch + 1) + " batch " +
                            std::to_string(b / cfg.batch_size + 1) + ": " + e.what());
      }
      rec.train_ce += loss.ce * loss.used;
      rec.train_ctc += loss.ctc * loss.used;
      rec.train_loss += loss.combined * loss.used;
      used += loss.used;
    }
    rec.train_ce /= used;
    rec.train_ctc /= used;
    rec.train_loss /= used;

    BatchLoss v = Evaluate(model, valid, weights);
    if (v.used == 0) throw TrainingError("no usable validation utterance");
    rec.valid_ce = v.ce;
    rec.valid_ctc = v.ctc;
    rec.valid_loss = v.combined;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.wall_seconds = options.record_wall_time ? elapsed : 0.0;
    if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.valid_loss))
      throw TrainingError("epoch " + std::to_string(epoch + 1) + ": loss is not finite");
    s.curves.epochs.push_back(rec);

    if (epoch >= cfg.warmup_epochs && (s.best_epoch == 0 || rec.valid_loss < s.best_loss)) {
      s.best_epoch = rec.epoch;
      s.best_loss = rec.valid_loss;
      s.best_params = model.params();
    }
    if (options.log) {
      *options.log << "epoch " << rec.epoch << "/" << cfg.epochs
                   << (weights.ce_enabled ? "" : " (warmup)")
                   << " train L=" << FormatFixed(rec.train_loss, 4)
                   << " ce=" << FormatFixed(rec.train_ce, 4)
                   << " ctc=" << FormatFixed(rec.train_ctc, 4)
                   << " | valid L=" << FormatFixed(rec.valid_loss, 4)
                   << " ce=" << FormatFixed(rec.valid_ce, 4)
                   << " ctc=" << FormatFixed(rec.valid_ctc, 4) << " ["
                   << FormatFixed(elapsed, 1) << "s]\n";
      options.log->flush();
    }
    if (options.on_epoch) options.on_epoch(rec.epoch, model);
  }

  TrainResult result;
  result.curves = s.curves;
  result.complete = static_cast<int>(s.curves.epochs.size()) == cfg.epochs;
  result.final = StateCheckpoint(model, s);
  // With every epoch inside warmup there is nothing eligible; keep the last.
  if (s.best_epoch == 0) {
    result.best_epoch = static_cast<int>(s.curves.epochs.size());
    result.best.params = model.params();
  } else {
    result.best_epoch = s.best_epoch;
    result.best.params = s.best_params;
  }
  result.best.config = model.config();
  result.best.alpha = cfg.alpha;
  result.best.warmup_epochs = cfg.warmup_epochs;
  result.best.epoch = result.best_epoch;
  if (result.best_epoch > 0)
    result.best.extra = {{"valid_loss", s.curves.epochs[result.best_epoch - 1].valid_loss}};
  return result;
}

}  // namespace

TrainResult Train(MtlModel &model, std::span<const Example> train,
                  std::span<const Example> valid, const TrainConfig &config,
                  const TrainOptions &options) {
  config.Validate();
  CheckData(train, valid);
  LoopState s;
  s.config = config;
  s.adam = InitAdam(model.params());
  return RunLoop(model, s, train, valid, options);
}

TrainResult Resume(const ModelCheckpoint &state, std::span<const Example> train,
                   std::span<const Example> valid, const TrainOptions &options) {
  CheckData(train, valid);
  if (!state.extra.contains("train_config") || !state.extra.contains("adam_step"))
    throw ValidationError("checkpoint carries no training state");
  LoopState s;
  s.config = TrainConfigFromJson(state.extra.at("train_config"));
  s.adam.step = state.extra.at("adam_step").get<long long>();
  s.curves = CurvesFromJson(state.extra.at("curves"));
  s.best_epoch = state.extra.at("best_epoch").get<int>();
  s.curves.Validate();
  if (static_cast<int>(s.curves.epochs.size()) != state.epoch)
    throw ValidationError("checkpoint curves do not match its epoch count");
  for (const auto &[name, tensors] : state.extra_tensors) {
    if (name == "adam.m") s.adam.m = tensors;
    else if (name == "adam.v") s.adam.v = tensors;
    else if (name == "best") s.best_params = tensors;
  }
  if (!s.adam.m.SameLayout(state.params) || !s.adam.v.SameLayout(state.params))
    throw ValidationError("checkpoint optimizer state does not match its parameters");
  if (s.best_epoch > 0) {
    if (!s.best_params.SameLayout(state.params) || s.best_epoch > state.epoch)
      throw ValidationError("checkpoint best-model state is inconsistent");
    s.best_loss = s.curves.epochs[s.best_epoch - 1].valid_loss;
  }
  MtlModel model(state.config, state.params);
  return RunLoop(model, s, train, valid, options);
}

}  // namespace dmtl
