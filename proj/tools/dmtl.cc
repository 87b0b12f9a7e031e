// tools/dmtl.cc

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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmtl/cli/commands.h"
#include "dmtl/cli/config.h"

namespace {

using dmtl::ExperimentConfig;

// Flag values; unset flags leave the config untouched.
struct Overrides {
  std::string config_path;
  std::optional<std::string> output_root, roster, manifest, plan, feature_set, family, metric,
      grid, adapter, checkpoint, partition;
  std::optional<std::vector<double>> ratios;
  std::optional<std::vector<std::string>> partitions;
  std::optional<std::uint64_t> seed, split_seed;
  std::optional<int> epochs, warmup, batch_size, feature_dim, iterations;
  std::optional<double> alpha, lr, clip_norm, perplexity;
  bool no_ctc_head = false;
  bool print_config = false;
};

void AddCommon(CLI::App *cmd, Overrides &o) {
  cmd->add_option("-c,--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--output-root", o.output_root,
                  std::string("output root (default: config, then $") + dmtl::kOutputRootEnv +
                      ", then ./runs)");
  cmd->add_option("--roster", o.roster, "speaker roster (jsonl)");
  cmd->add_option("--manifest", o.manifest, "utterance manifest (jsonl)");
  cmd->add_option("--plan", o.plan, "per-cell split plan (tsv)");
  cmd->add_option("--ratios", o.ratios, "train valid test ratios")->expected(3);
  cmd->add_option("--seed", o.seed, "seed for every stage");
  cmd->add_option("--split-seed", o.split_seed, "split seed (overrides --seed)");
  cmd->add_flag("--print-config", o.print_config, "print the effective config and exit");
}

void AddFeatures(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--set", o.feature_set, "acoustic | linguistic | combined");
}

void AddModel(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--e,--warmup-epochs", o.warmup, "epochs before the severity loss is added");
  cmd->add_option("--alpha", o.alpha, "CTC weight; 0 trains severity only");
  cmd->add_option("--lr", o.lr, "Adam learning rate");
  cmd->add_option("--batch-size", o.batch_size);
  cmd->add_option("--clip-norm", o.clip_norm, "global gradient norm limit");
  cmd->add_option("--feature-dim", o.feature_dim, "encoder output width F");
  cmd->add_option("--adapter", o.adapter, "external encoder command instead of the toy encoder");
  cmd->add_flag("--no-ctc-head", o.no_ctc_head, "build the model without the CTC head");
}

ExperimentConfig Resolve(const Overrides &o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) c = dmtl::LoadExperimentConfig(o.config_path);
  if (o.output_root) c.output_root = *o.output_root;
  if (o.roster) c.corpus.roster = *o.roster;
  if (o.manifest) c.corpus.manifest = *o.manifest;
  if (o.plan) c.split.plan = *o.plan;
  if (o.ratios) c.split.ratios = {(*o.ratios)[0], (*o.ratios)[1], (*o.ratios)[2]};
  if (o.seed) {
    c.split.seed = c.baseline.seed = c.model.seed = c.model.encoder.seed = c.train.seed =
        c.analyze.embedding.seed = *o.seed;
  }
  if (o.split_seed) c.split.seed = *o.split_seed;
  if (o.feature_set) c.features = dmtl::ParseFeatureSet(*o.feature_set);
  if (o.family) c.baseline.family = dmtl::ParseFamily(*o.family);
  if (o.metric) c.baseline.metric = dmtl::ParseGridMetric(*o.metric);
  if (o.grid) c.baseline.grid = nlohmann::json::parse(*o.grid);
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.warmup) c.train.warmup_epochs = *o.warmup;
  if (o.alpha) c.train.alpha = *o.alpha;
  if (o.lr) c.train.lr = *o.lr;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.clip_norm) c.train.clip_norm = *o.clip_norm;
  if (o.feature_dim) c.model.encoder.feature_dim = *o.feature_dim;
  if (o.adapter) {
    c.model.encoder.kind = dmtl::EncoderKind::kExternalAdapter;
    c.model.encoder.adapter_command = *o.adapter;
  }
  if (o.no_ctc_head) c.model.ctc_head = false;
  if (o.checkpoint) c.evaluate.checkpoint = c.analyze.checkpoint = *o.checkpoint;
  if (o.partition) c.evaluate.partition = *o.partition;
  if (o.partitions) c.analyze.partitions = *o.partitions;
  if (o.perplexity) c.analyze.embedding.perplexity = *o.perplexity;
  if (o.iterations) c.analyze.embedding.iterations = *o.iterations;
  c.Validate();
  return c;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Dysarthria severity classification: baselines and multi-task fine-tuning"};
  app.require_subcommand(1);
  Overrides o;

  dmtl::SynthConfig synth;
  std::string synth_out;
  auto *cmd_synth = app.add_subcommand("synth", "generate a synthetic corpus");
  cmd_synth->add_option("-o,--out", synth_out, "output directory")->required();
  cmd_synth->add_option("--seed", synth.seed);
  cmd_synth->add_option("--speakers", synth.speakers, "number of speakers, at least 25");
  cmd_synth->add_option("--repetitions", synth.repetitions);
  cmd_synth->add_option("--sample-rate", synth.sample_rate);

  auto *cmd_split = app.add_subcommand("split", "speaker-independent train/valid/test split");
  AddCommon(cmd_split, o);

  auto *cmd_features = app.add_subcommand("extract-features", "utterance-level feature vectors");
  AddCommon(cmd_features, o);
  AddFeatures(cmd_features, o);

  auto *cmd_baseline = app.add_subcommand("train-baseline", "grid-searched SVM / MLP / GBDT");
  AddCommon(cmd_baseline, o);
  AddFeatures(cmd_baseline, o);
  cmd_baseline->add_option("--family", o.family, "svm | mlp | gbdt");
  cmd_baseline->add_option("--metric", o.metric, "selection metric: f1 | accuracy");
  cmd_baseline->add_option("--grid", o.grid, "JSON object of hyperparameter lists");

  auto *cmd_train = app.add_subcommand("train-mtl", "fine-tune the encoder with CE + CTC");
  AddCommon(cmd_train, o);
  AddModel(cmd_train, o);

  auto *cmd_eval = app.add_subcommand("evaluate", "metrics of a trained model on a partition");
  AddCommon(cmd_eval, o);
  AddModel(cmd_eval, o);
  cmd_eval->add_option("--checkpoint", o.checkpoint, "best | final");
  cmd_eval->add_option("--partition", o.partition, "train | valid | test");

  auto *cmd_analyze = app.add_subcommand("analyze", "latent export, 2-D embedding, silhouettes");
  AddCommon(cmd_analyze, o);
  AddModel(cmd_analyze, o);
  cmd_analyze->add_option("--checkpoint", o.checkpoint, "best | final");
  cmd_analyze->add_option("--partitions", o.partitions, "partitions to export");
  cmd_analyze->add_option("--perplexity", o.perplexity);
  cmd_analyze->add_option("--iterations", o.iterations);

  std::string run_a, run_b, compare_out;
  auto *cmd_compare = app.add_subcommand("compare", "compare the loss curves of two runs");
  cmd_compare->add_option("run_a", run_a, "train-mtl directory or curves file")->required();
  cmd_compare->add_option("run_b", run_b, "train-mtl directory or curves file")->required();
  cmd_compare->add_option("-o,--out", compare_out, "output directory");
  cmd_compare->add_option("-c,--config", o.config_path)->check(CLI::ExistingFile);
  cmd_compare->add_option("--output-root", o.output_root);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_synth->parsed()) {
      dmtl::CmdSynth(synth, synth_out, std::cerr);
      return 0;
    }
    ExperimentConfig config = Resolve(o);
    if (o.print_config) {
      std::cout << dmtl::ToJson(config).dump(2) << "\n";
      return 0;
    }
    std::string out;
    if (cmd_split->parsed()) out = dmtl::CmdSplit(config, std::cerr);
    else if (cmd_features->parsed()) out = dmtl::CmdExtractFeatures(config, std::cerr);
    else if (cmd_baseline->parsed()) out = dmtl::CmdTrainBaseline(config, std::cerr);
    else if (cmd_train->parsed()) out = dmtl::CmdTrainMtl(config, std::cerr);
    else if (cmd_eval->parsed()) out = dmtl::CmdEvaluate(config, std::cerr);
    else if (cmd_analyze->parsed()) out = dmtl::CmdAnalyze(config, std::cerr);
    else if (cmd_compare->parsed())
      out = dmtl::CmdCompare(config, run_a, run_b, compare_out, std::cerr);
    std::cout << out << "\n";
  } catch (const std::exception &e) {
    std::cerr << "dmtl: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
