// tests/unit/cli_test.cc

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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "dmtl/cli/commands.h"
#include "dmtl/cli/config.h"
#include "dmtl/cli/synth.h"
#include "dmtl/corpus/manifest.h"
#include "test_util.h"

using namespace dmtl;
using namespace dmtl::testing;
namespace fs = std::filesystem;

namespace {

// Every regular file below dir, keyed by relative path, with its hash.
std::map<std::string, std::string> TreeHashes(const fs::path &dir) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      out[fs::relative(e.path(), dir).string()] = HashFile(e.path().string());
  return out;
}

int RunTool(const std::string &args, std::string *output = nullptr) {
  std::string cmd = std::string(DMTL_BINARY) + " " + args + " 2>&1";
  FILE *p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string text;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) text += buf;
  int status = pclose(p);
  if (output) *output = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("synthetic corpus shape") {
  SynthConfig c;
  c.seed = 0;
  SynthCorpus corpus = GenerateSynthCorpus(c);
  CHECK(corpus.roster.size() == 50);
  CHECK(corpus.utterances.size() == 500);
  std::map<std::string, int> per_speaker;
  std::map<int, int> per_class;
  for (const auto &s : corpus.roster) ++per_class[s.severity];
  for (const auto &u : corpus.utterances) {
    ++per_speaker[u.speaker_id];
    CHECK(u.transcript == SynthText(u.text_id));
    REQUIRE(u.audio.has_value());
    u.audio->Validate();
  }
  CHECK(per_speaker.size() == 50);
  for (const auto &[id, n] : per_speaker) CHECK(n == 10);
  for (const auto &[k, n] : per_class) CHECK(n == 10);

  std::vector<double> v = FrameEnergyVarianceBySeverity(corpus);
  REQUIRE(v.size() == 5);
  for (int k = 1; k < 5; ++k) CHECK(v[k] > v[k - 1]);

  SynthConfig small;
  small.speakers = 24;
  CHECK_THROWS(GenerateSynthCorpus(small));
}

TEST_CASE("synthetic corpus is byte-identical for a seed") {
  TempDir dir;
  std::ostringstream log;
  SynthConfig c;
  c.seed = 3;
  c.speakers = 25;
  CmdSynth(c, dir.file("a"), log);
  CmdSynth(c, dir.file("b"), log);
  auto a = TreeHashes(dir.file("a")), b = TreeHashes(dir.file("b"));
  CHECK(a.size() == 250 + 4);
  CHECK(a == b);
  c.seed = 4;
  CmdSynth(c, dir.file("c"), log);
  CHECK(TreeHashes(dir.file("c")) != a);
}

TEST_CASE("config round trip and validation") {
  ExperimentConfig def;
  nlohmann::json j = ToJson(def);
  CHECK(ToJson(ExperimentConfigFromJson(j)) == j);

  nlohmann::json patch = {{"train", {{"alpha", 0.0}, {"warmup_epochs", 20}}},
                          {"split", {{"seed", 9}}},
                          {"baseline", {{"family", "gbdt"}, {"grid", {{"max_depth", {3, 4}}}}}},
                          {"model", {{"encoder", {{"feature_dim", 16}}}}}};
  ExperimentConfig c = ExperimentConfigFromJson(patch);
  CHECK(c.train.alpha == 0.0);
  CHECK(c.train.warmup_epochs == 20);
  CHECK(c.train.epochs == TrainConfig{}.epochs);
  CHECK(c.split.seed == 9);
  CHECK(c.baseline.family == Family::kGbdt);
  CHECK(c.model.encoder.feature_dim == 16);
  CHECK(c.model.encoder.conv1_kernel == 40);
  nlohmann::json full = ToJson(c);
  CHECK(ToJson(ExperimentConfigFromJson(full)) == full);

  CHECK_THROWS_WITH(ExperimentConfigFromJson({{"trian", {}}}),
                    doctest::Contains("unknown key 'trian'"));
  CHECK_THROWS_WITH(ExperimentConfigFromJson({{"train", {{"lr2", 1}}}}),
                    doctest::Contains("train.lr2"));
  CHECK_THROWS_WITH(ExperimentConfigFromJson({{"model", {{"encoder", {{"width", 1}}}}}}),
                    doctest::Contains("model.encoder.width"));
  CHECK_THROWS(ExperimentConfigFromJson({{"train", {{"lr", "fast"}}}}));
  CHECK_THROWS(ExperimentConfigFromJson({{"split", {{"ratios", {0.5, 0.5}}}}}));
  CHECK_THROWS(ExperimentConfigFromJson({{"split", {{"ratios", {0.5, 0.3, 0.3}}}}}));
  CHECK_THROWS(ExperimentConfigFromJson({{"evaluate", {{"checkpoint", "latest"}}}}));
  CHECK_THROWS(ExperimentConfigFromJson({{"baseline", {{"family", "gbdt"},
                                                       {"grid", {{"max_depth", {6}}}}}}}));
  CHECK_THROWS(ExperimentConfigFromJson({{"baseline", {{"family", "mlp"},
                                                       {"grid", {{"hidden_layers", {0}}}}}}}));

  TempDir dir;
  WriteText(dir.file("c.json"), "{\"train\": {\"epochs\": 7}}");
  CHECK(LoadExperimentConfig(dir.file("c.json")).train.epochs == 7);
  WriteText(dir.file("bad.json"), "{\"train\": ");
  CHECK_THROWS(LoadExperimentConfig(dir.file("bad.json")));
}

TEST_CASE("output root precedence") {
  ExperimentConfig c;
  unsetenv(kOutputRootEnv);
  CHECK(ResolveOutputRoot(c) == "runs");
  setenv(kOutputRootEnv, "/tmp/elsewhere", 1);
  CHECK(ResolveOutputRoot(c) == "/tmp/elsewhere");
  c.output_root = "mine";
  CHECK(ResolveOutputRoot(c) == "mine");
  unsetenv(kOutputRootEnv);
}

TEST_CASE("hashing") {
  CHECK(HashHex("") == "cbf29ce484222325");
  CHECK(HashHex("a") == "af63dc4c8601ec8c");
  CHECK(HashJson({{"a", 1}}) == HashJson(nlohmann::json::parse("{ \"a\" : 1 }")));
}

TEST_CASE("pipeline directories and upstream checks") {
  TempDir dir;
  std::ostringstream log;
  SynthConfig s;
  s.seed = 2;
  s.speakers = 25;
  CmdSynth(s, dir.file("corpus"), log);

  ExperimentConfig c;
  c.corpus = {dir.file("corpus/roster.jsonl"), dir.file("corpus/manifest.jsonl")};
  c.output_root = dir.file("runs");
  c.split.seed = 2;
  c.features = FeatureSetId::kAcoustic;

  StageDirs d = ResolveStageDirs(c);
  CHECK(!fs::exists(d.split));
  try {
    CmdTrainMtl(c, log);
    FAIL("expected a missing artifact");
  } catch (const MissingArtifactError &e) {
    CHECK(e.path() == (fs::path(d.split) / "split.tsv").string());
  }

  CHECK(CmdSplit(c, log) == d.split);
  auto first = TreeHashes(d.split);
  CmdSplit(c, log);
  CHECK(TreeHashes(d.split) == first);
  CHECK(fs::exists(fs::path(d.split) / "run.json"));

  try {
    CmdTrainBaseline(c, log);
    FAIL("expected a missing artifact");
  } catch (const MissingArtifactError &e) {
    CHECK(e.path() == (fs::path(d.features) / "features.tsv").string());
  }

  ExperimentConfig other = c;
  other.train.alpha = 0.0;
  CHECK(ResolveStageDirs(other).mtl != d.mtl);
  CHECK(ResolveStageDirs(other).split == d.split);
  other.split.seed = 3;
  CHECK(ResolveStageDirs(other).split != d.split);

  ExperimentConfig missing = c;
  missing.corpus.roster = dir.file("nope.jsonl");
  CHECK_THROWS_WITH(CmdSplit(missing, log), doctest::Contains("nope.jsonl"));
}

TEST_CASE("command line tool") {
  TempDir dir;
  std::string out;
  CHECK(RunTool("", &out) != 0);
  CHECK(RunTool("frobnicate", &out) != 0);
  CHECK(RunTool("synth --out " + dir.file("corpus") + " --speakers 25 --seed 5", &out) == 0);
  CHECK(fs::exists(dir.file("corpus/manifest.jsonl")));
  CHECK(RunTool("synth --out " + dir.file("x") + " --speakers 10", &out) != 0);

  const std::string corpus = " --roster " + dir.file("corpus/roster.jsonl") + " --manifest " +
                             dir.file("corpus/manifest.jsonl") + " --output-root " +
                             dir.file("runs");
  WriteText(dir.file("c.json"), "{\"train\": {\"epochs\": 7, \"alpha\": 0.3}}");
  CHECK(RunTool("train-mtl --print-config -c " + dir.file("c.json") + " --alpha 0 --e 2" + corpus,
                &out) == 0);
  nlohmann::json j = nlohmann::json::parse(out);
  CHECK(j["train"]["epochs"] == 7);
  CHECK(j["train"]["alpha"] == 0.0);
  CHECK(j["train"]["warmup_epochs"] == 2);

  WriteText(dir.file("typo.json"), "{\"trian\": {}}");
  CHECK(RunTool("split -c " + dir.file("typo.json") + corpus, &out) == 1);
  CHECK(out.find("unknown key 'trian'") != std::string::npos);

  CHECK(RunTool("evaluate" + corpus, &out) == 1);
  CHECK(out.find("missing upstream artifact") != std::string::npos);
  CHECK(out.find("split.tsv") != std::string::npos);

  CHECK(RunTool("split --plan " + dir.file("none.tsv") + corpus, &out) == 1);
  CHECK(out.find("none.tsv") != std::string::npos);
  CHECK(RunTool("split" + corpus, &out) == 0);
  CHECK(RunTool("compare " + dir.file("a") + " " + dir.file("b") + " --output-root " +
                    dir.file("runs"),
                &out) == 1);
}
