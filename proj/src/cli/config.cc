// src/cli/config.cc

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

#include "dmtl/cli/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dmtl/common/error.h"

namespace dmtl {

namespace {

// Overlay `patch` on `base`, recursing into objects that exist in both.
void MergeStrict(nlohmann::json &base, const nlohmann::json &patch, const std::string &where) {
  if (!patch.is_object()) throw Error("config: " + where + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw Error("config: unknown key '" + key + "'");
    nlohmann::json &slot = base[it.key()];
    if (slot.is_object() && it.value().is_object()) MergeStrict(slot, it.value(), key);
    else slot = it.value();
  }
}

template <typename T>
T Get(const nlohmann::json &j, const char *key, const std::string &where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw Error("config: bad value for '" + where + "." + key + "'");
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  const double sum = split.ratios.train + split.ratios.valid + split.ratios.test;
  if (split.ratios.train <= 0 || split.ratios.valid <= 0 || split.ratios.test <= 0 ||
      std::abs(sum - 1.0) > 1e-9)
    throw Error("config: split ratios must be positive and sum to 1");
  model.encoder.Validate();
  train.Validate();
  if (evaluate.checkpoint != "best" && evaluate.checkpoint != "final")
    throw Error("config: evaluate.checkpoint must be 'best' or 'final'");
  ParsePartition(evaluate.partition);
  if (analyze.checkpoint != "best" && analyze.checkpoint != "final")
    throw Error("config: analyze.checkpoint must be 'best' or 'final'");
  if (analyze.partitions.empty()) throw Error("config: analyze.partitions is empty");
  for (const std::string &p : analyze.partitions) ParsePartition(p);
  if (analyze.embedding.perplexity <= 0 || analyze.embedding.iterations < 1 ||
      analyze.embedding.exaggeration_iterations < 0 || analyze.embedding.exaggeration <= 0)
    throw Error("config: bad embedding settings");
  if (analyze.neighbours < 1) throw Error("config: analyze.neighbours must be >= 1");
  if (!baseline.grid.is_null()) {
    GridSpec g;
    g.family = baseline.family;
    if (!baseline.grid.is_object()) throw Error("config: baseline.grid must be an object");
    for (auto it = baseline.grid.begin(); it != baseline.grid.end(); ++it) {
      if (!it.value().is_array()) throw Error("config: baseline.grid." + it.key() + " must be a list");
      g.values[it.key()] = it.value().get<std::vector<nlohmann::json>>();
    }
    for (const nlohmann::json &cfg : g.Configs()) ValidateClassifierConfig(g.family, cfg);
  }
}

nlohmann::json ToJson(const ExperimentConfig &c) {
  nlohmann::json model = ToJson(MakeModelConfig(c.model, 0));
  model.erase("vocabulary");
  const EmbeddingConfig &e = c.analyze.embedding;
  return {
      {"corpus", {{"roster", c.corpus.roster}, {"manifest", c.corpus.manifest}}},
      {"split",
       {{"ratios", {c.split.ratios.train, c.split.ratios.valid, c.split.ratios.test}},
        {"seed", c.split.seed},
        {"plan", c.split.plan}}},
      {"features", {{"set", FeatureSetName(c.features)}}},
      {"baseline",
       {{"family", FamilyName(c.baseline.family)},
        {"metric", c.baseline.metric == GridMetric::kMacroF1 ? "f1" : "accuracy"},
        {"grid", c.baseline.grid},
        {"seed", c.baseline.seed}}},
      {"model", model},
      {"train", ToJson(c.train)},
      {"evaluate", {{"checkpoint", c.evaluate.checkpoint}, {"partition", c.evaluate.partition}}},
      {"analyze",
       {{"checkpoint", c.analyze.checkpoint},
        {"partitions", c.analyze.partitions},
        {"perplexity", e.perplexity},
        {"iterations", e.iterations},
        {"exaggeration_iterations", e.exaggeration_iterations},
        {"exaggeration", e.exaggeration},
        {"seed", e.seed},
        {"neighbours", c.analyze.neighbours}}},
      {"output_root", c.output_root}};
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json &patch) {
  nlohmann::json j = ToJson(ExperimentConfig{});
  MergeStrict(j, patch, "");

  ExperimentConfig c;
  const auto &corpus = j["corpus"];
  c.corpus.roster = Get<std::string>(corpus, "roster", "corpus");
  c.corpus.manifest = Get<std::string>(corpus, "manifest", "corpus");

  const auto &split = j["split"];
  auto ratios = Get<std::vector<double>>(split, "ratios", "split");
  if (ratios.size() != 3) throw Error("config: split.ratios needs three values");
  c.split.ratios = {ratios[0], ratios[1], ratios[2]};
  c.split.seed = Get<std::uint64_t>(split, "seed", "split");
  c.split.plan = Get<std::string>(split, "plan", "split");

  c.features = ParseFeatureSet(Get<std::string>(j["features"], "set", "features"));

  const auto &b = j["baseline"];
  c.baseline.family = ParseFamily(Get<std::string>(b, "family", "baseline"));
  c.baseline.metric = ParseGridMetric(Get<std::string>(b, "metric", "baseline"));
  c.baseline.grid = b["grid"];
  c.baseline.seed = Get<std::uint64_t>(b, "seed", "baseline");

  nlohmann::json model = j["model"];
  model["vocabulary"] = nlohmann::json::array();
  ModelConfig mc;
  try {
    mc = ModelConfigFromJson(model);
  } catch (const nlohmann::json::exception &) {
    throw Error("config: bad value in 'model'");
  }
  c.model.encoder = mc.encoder;
  c.model.ctc_head = mc.ctc_head;
  c.model.seed = mc.seed;

  try {
    c.train = TrainConfigFromJson(j["train"]);
  } catch (const nlohmann::json::exception &) {
    throw Error("config: bad value in 'train'");
  }

  const auto &ev = j["evaluate"];
  c.evaluate.checkpoint = Get<std::string>(ev, "checkpoint", "evaluate");
  c.evaluate.partition = Get<std::string>(ev, "partition", "evaluate");

  const auto &an = j["analyze"];
  c.analyze.checkpoint = Get<std::string>(an, "checkpoint", "analyze");
  c.analyze.partitions = Get<std::vector<std::string>>(an, "partitions", "analyze");
  c.analyze.embedding.perplexity = Get<double>(an, "perplexity", "analyze");
  c.analyze.embedding.iterations = Get<int>(an, "iterations", "analyze");
  c.analyze.embedding.exaggeration_iterations = Get<int>(an, "exaggeration_iterations", "analyze");
  c.analyze.embedding.exaggeration = Get<double>(an, "exaggeration", "analyze");
  c.analyze.embedding.seed = Get<std::uint64_t>(an, "seed", "analyze");
  c.analyze.neighbours = Get<int>(an, "neighbours", "analyze");

  c.output_root = Get<std::string>(j, "output_root", "");
  c.Validate();
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error("config " + path + ": " + e.what());
  }
  return ExperimentConfigFromJson(j);
}

std::string ResolveOutputRoot(const ExperimentConfig &config) {
  if (!config.output_root.empty()) return config.output_root;
  const char *env = std::getenv(kOutputRootEnv);
  if (env && *env) return env;
  return kDefaultOutputRoot;
}

std::string HashHex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string HashFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return HashHex(ss.str());
}

std::string HashJson(const nlohmann::json &j) { return HashHex(j.dump()); }

ModelConfig MakeModelConfig(const ModelSettings &s, int vocabulary_size) {
  ModelConfig c;
  c.encoder = s.encoder;
  c.ctc_head = s.ctc_head;
  c.seed = s.seed;
  for (int i = 0; i < vocabulary_size; ++i) c.vocabulary.push_back("tok" + std::to_string(i));
  return c;
}

}  // namespace dmtl
