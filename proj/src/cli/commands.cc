// src/cli/commands.cc

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

#include "dmtl/cli/commands.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "dmtl/common/strings.h"
#include "dmtl/corpus/manifest.h"
#include "dmtl/evaluation/metrics.h"

namespace fs = std::filesystem;

namespace dmtl {

namespace {

constexpr const char *kVersion = "1";

void Require(const std::string &path, const std::string &producer) {
  if (!fs::exists(path)) throw MissingArtifactError(path, producer);
}

void RequireInput(const std::string &path, const std::string &what) {
  if (path.empty()) throw Error("no " + what + " configured");
  if (!fs::exists(path)) throw IoError(what + " not found: " + path);
}

std::string Join(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

void WriteJsonFile(const std::string &path, const nlohmann::json &j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("error writing " + path);
}

void WriteTextFile(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("error writing " + path);
}

std::string MakeDir(const std::string &dir) {
  fs::create_directories(dir);
  return dir;
}

// Records what a run consumed and produced; no timestamps, so reruns match.
void WriteRunManifest(const std::string &dir, const std::string &command,
                      const nlohmann::json &settings, std::uint64_t seed,
                      const std::vector<std::string> &inputs,
                      const std::vector<std::string> &outputs) {
  nlohmann::json in = nlohmann::json::array();
  for (const std::string &p : inputs) in.push_back({{"path", p}, {"fnv1a64", HashFile(p)}});
  nlohmann::json out = nlohmann::json::array();
  for (const std::string &name : outputs) {
    const std::string p = Join(dir, name);
    if (!fs::exists(p)) throw Error("declared output was not written: " + p);
    out.push_back({{"path", name}, {"fnv1a64", HashFile(p)}});
  }
  WriteJsonFile(Join(dir, "run.json"), {{"command", command},
                                        {"version", kVersion},
                                        {"config", settings},
                                        {"config_hash", HashJson(settings)},
                                        {"seed", seed},
                                        {"inputs", in},
                                        {"outputs", out}});
}

std::string CorpusHash(const ExperimentConfig &c) {
  RequireInput(c.corpus.roster, "roster");
  RequireInput(c.corpus.manifest, "manifest");
  return HashHex(HashFile(c.corpus.roster) + HashFile(c.corpus.manifest));
}

nlohmann::json SplitKey(const ExperimentConfig &c, const std::string &roster_hash,
                        const std::string &manifest_hash) {
  nlohmann::json s = ToJson(c)["split"];
  s["plan"] = c.split.plan.empty() ? "" : HashFile(c.split.plan);
  return {{"roster", roster_hash}, {"manifest", manifest_hash}, {"split", s}};
}

std::string Short(const std::string &hash) { return hash.substr(0, 12); }

std::string MtlKeyHash(const ExperimentConfig &c, const std::string &corpus,
                       const std::string &split) {
  nlohmann::json j = ToJson(c);
  return HashJson({{"corpus", corpus}, {"split", split}, {"model", j["model"]},
                   {"train", j["train"]}});
}

struct LoadedData {
  Corpus corpus;
  SplitAssignment split;
  std::map<std::string, int> severity;  // by speaker

  Partition PartitionOf(const Utterance &u) const {
    auto it = split.find(u.speaker_id);
    if (it == split.end()) throw ValidationError("speaker " + u.speaker_id + " is not in the split");
    return it->second;
  }
  int SeverityOf(const Utterance &u) const { return severity.at(u.speaker_id); }
};

LoadedData LoadData(const ExperimentConfig &c, const StageDirs &dirs, bool audio) {
  const std::string split_path = Join(dirs.split, "split.tsv");
  Require(split_path, "split");
  LoadedData d;
  d.corpus = LoadCorpus(c.corpus.roster, c.corpus.manifest, audio);
  d.split = ReadSplit(split_path);
  for (const SpeakerRecord &s : d.corpus.roster) d.severity[s.speaker_id] = s.severity;
  return d;
}

int VocabularySize(const Corpus &corpus) {
  int top = -1;
  for (const Utterance &u : corpus.utterances)
    for (int t : u.transcript) top = std::max(top, t);
  if (top < 0) throw ValidationError("manifest has no transcript tokens");
  return top + 1;
}

std::string FormatMetrics(const MetricsReport &r) { return RenderMetricsTable(r); }

void WritePredictions(const std::string &path, const std::vector<std::string> &ids,
                      const std::vector<int> &truth, const std::vector<int> &pred,
                      const std::vector<Eigen::VectorXd> *probs = nullptr) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "utterance_id\tseverity\tpredicted";
  if (probs)
    for (int k = 0; k < kNumSeverityClasses; ++k) out << "\tp" << k;
  out << "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i] << "\t" << truth[i] << "\t" << pred[i];
    if (probs)
      for (int k = 0; k < kNumSeverityClasses; ++k) out << "\t" << FormatDouble((*probs)[i][k]);
    out << "\n";
  }
  if (!out) throw IoError("error writing " + path);
}

TrainingCurves CurvesFrom(const std::string &run, const std::string &producer) {
  std::string path = fs::is_directory(run) ? Join(run, "curves.tsv") : run;
  Require(path, producer);
  return ReadCurves(path);
}

}  // namespace

StageDirs ResolveStageDirs(const ExperimentConfig &c) {
  const std::string root = ResolveOutputRoot(c);
  RequireInput(c.corpus.roster, "roster");
  const std::string roster = HashFile(c.corpus.roster);
  const std::string manifest = c.corpus.manifest.empty() ? "" : HashFile(c.corpus.manifest);
  if (!c.split.plan.empty()) RequireInput(c.split.plan, "split plan");
  const std::string split = HashJson(SplitKey(c, roster, manifest));
  const std::string corpus = HashHex(roster + manifest);
  const std::string features =
      HashJson({{"corpus", corpus}, {"set", FeatureSetName(c.features)}});
  nlohmann::json base = ToJson(c)["baseline"];
  const std::string baseline =
      HashJson({{"features", features}, {"split", split}, {"baseline", base}});

  StageDirs d;
  d.split = Join(root, "split-" + Short(split));
  d.features = Join(root, std::string("features-") + FeatureSetName(c.features) + "-" +
                              Short(features));
  d.baseline =
      Join(root, std::string("baseline-") + FamilyName(c.baseline.family) + "-" + Short(baseline));
  d.mtl = Join(root, "mtl-" + Short(MtlKeyHash(c, corpus, split)));
  return d;
}

std::string CmdSynth(const SynthConfig &synth, const std::string &out_dir, std::ostream &log) {
  if (out_dir.empty()) throw Error("synth needs an output directory");
  SynthCorpus corpus = GenerateSynthCorpus(synth);
  MakeDir(out_dir);
  WriteSynthCorpus(out_dir, corpus, synth.sample_rate);
  std::vector<double> variance = FrameEnergyVarianceBySeverity(corpus);
  nlohmann::json check = nlohmann::json::array();
  for (double v : variance) check.push_back(v);
  bool monotone = true;
  for (std::size_t k = 1; k < variance.size(); ++k) monotone = monotone && variance[k] > variance[k - 1];
  WriteJsonFile(Join(out_dir, "synth_check.json"),
                {{"frame_energy_variance_by_severity", check}, {"monotone", monotone}});
  if (!monotone) throw ValidationError("frame-energy variance is not increasing with severity");
  nlohmann::json settings = {{"seed", synth.seed},
                             {"speakers", synth.speakers},
                             {"sample_rate", synth.sample_rate},
                             {"repetitions", synth.repetitions}};
  WriteRunManifest(out_dir, "synth", settings, synth.seed, {},
                   {"roster.jsonl", "manifest.jsonl", "synth_check.json"});
  log << "synth: " << corpus.roster.size() << " speakers, " << corpus.utterances.size()
      << " utterances -> " << out_dir << "\n";
  return out_dir;
}

std::string CmdSplit(const ExperimentConfig &c, std::ostream &log) {
  StageDirs dirs = ResolveStageDirs(c);
  std::vector<SpeakerRecord> roster = LoadRoster(c.corpus.roster);
  std::vector<Utterance> utterances;
  std::vector<std::string> inputs = {c.corpus.roster};
  if (!c.corpus.manifest.empty()) {
    utterances = LoadCorpus(c.corpus.roster, c.corpus.manifest, false).utterances;
    inputs.push_back(c.corpus.manifest);
  }
  SplitPlan plan;
  if (!c.split.plan.empty()) {
    plan = ReadSplitPlan(c.split.plan);
    inputs.push_back(c.split.plan);
  }
  SplitAssignment split =
      MakeSplit(roster, c.split.ratios, c.split.seed, c.split.plan.empty() ? nullptr : &plan);
  SplitReport report = ValidateSplit(roster, split, utterances);
  if (!report.violations.empty())
    throw ValidationError("split fails validation:\n" + FormatSplitReport(report));

  MakeDir(dirs.split);
  WriteSplit(Join(dirs.split, "split.tsv"), split);
  WriteSplitPlan(Join(dirs.split, "cell_counts.tsv"), report.cell_counts);
  WriteTextFile(Join(dirs.split, "report.txt"), FormatSplitReport(report));
  WriteRunManifest(dirs.split, "split", ToJson(c)["split"], c.split.seed, inputs,
                   {"split.tsv", "cell_counts.tsv", "report.txt"});
  log << FormatSplitReport(report) << "split -> " << dirs.split << "\n";
  return dirs.split;
}

std::string CmdExtractFeatures(const ExperimentConfig &c, std::ostream &log) {
  CorpusHash(c);
  StageDirs dirs = ResolveStageDirs(c);
  Corpus corpus = LoadCorpus(c.corpus.roster, c.corpus.manifest, false);
  FeatureTable table;
  std::size_t done = 0;
  for (const Utterance &u : corpus.utterances) {
    RawAudio audio = LoadAudio(corpus, u);
    table.utterance_ids.push_back(u.utterance_id);
    table.rows.push_back(ExtractFeatureSet(c.features, audio, u.transcript));
    if (++done % 100 == 0) log << "extract-features: " << done << "/" << corpus.utterances.size() << "\n";
  }
  MakeDir(dirs.features);
  WriteFeatureTable(Join(dirs.features, "features.tsv"), table);
  WriteRunManifest(dirs.features, "extract-features", {{"set", FeatureSetName(c.features)}}, 0,
                   {c.corpus.roster, c.corpus.manifest}, {"features.tsv"});
  log << "extract-features: " << table.rows.size() << " x "
      << (table.rows.empty() ? 0 : table.rows.front().size()) << " -> " << dirs.features << "\n";
  return dirs.features;
}

std::string CmdTrainBaseline(const ExperimentConfig &c, std::ostream &log) {
  CorpusHash(c);
  StageDirs dirs = ResolveStageDirs(c);
  const std::string features_path = Join(dirs.features, "features.tsv");
  Require(features_path, "extract-features");
  LoadedData d = LoadData(c, dirs, false);
  FeatureTable table = ReadFeatureTable(features_path);

  std::map<std::string, const Utterance *> by_id;
  for (const Utterance &u : d.corpus.utterances) by_id[u.utterance_id] = &u;
  if (table.rows.size() != by_id.size())
    throw ValidationError("feature table has " + std::to_string(table.rows.size()) +
                          " rows but the manifest lists " + std::to_string(by_id.size()));
  std::array<std::vector<std::size_t>, 3> index;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto it = by_id.find(table.utterance_ids[i]);
    if (it == by_id.end())
      throw ValidationError("feature row " + table.utterance_ids[i] + " is not in the manifest");
    index[static_cast<int>(d.PartitionOf(*it->second))].push_back(i);
  }
  auto build = [&](Partition p, std::vector<std::string> *ids) {
    const auto &rows = index[static_cast<int>(p)];
    LabelledData data;
    data.x.resize(rows.size(), table.rows.empty() ? 0 : table.rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const FeatureVector &f = table.rows[rows[r]];
      data.x.row(r) = Eigen::Map<const Eigen::RowVectorXd>(f.values.data(), f.values.size());
      data.y.push_back(d.SeverityOf(*by_id[table.utterance_ids[rows[r]]]));
      if (ids) ids->push_back(table.utterance_ids[rows[r]]);
    }
    return data;
  };
  std::vector<std::string> test_ids;
  LabelledData train = build(Partition::kTrain, nullptr);
  LabelledData valid = build(Partition::kValid, nullptr);
  LabelledData test = build(Partition::kTest, &test_ids);
  if (train.size() == 0 || valid.size() == 0 || test.size() == 0)
    throw ValidationError("every partition needs at least one utterance");

  GridSpec grid = DefaultGrid(c.baseline.family);
  if (!c.baseline.grid.is_null()) {
    grid.values.clear();
    for (auto it = c.baseline.grid.begin(); it != c.baseline.grid.end(); ++it)
      grid.values[it.key()] = it.value().get<std::vector<nlohmann::json>>();
  }
  log << "train-baseline: " << FamilyName(c.baseline.family) << " over "
      << grid.Configs().size() << " configurations\n";
  GridSearchResult result = GridSearch(grid, train, valid, c.baseline.metric, c.baseline.seed);
  for (GridResult &g : result.table) {
    if (!g.ok) log << "  failed " << g.config.dump() << ": " << g.error << "\n";
    g.seconds = 0.0;  // keep the table byte-stable across reruns
  }

  MakeDir(dirs.baseline);
  WriteGridTable(Join(dirs.baseline, "grid.tsv"), c.baseline.family, result.table);
  SaveClassifier(Join(dirs.baseline, "classifier.json"), result.best);
  MetricsReport vr = ComputeMetrics(valid.y, PredictRows(result.best, valid.x));
  std::vector<int> pred = PredictRows(result.best, test.x);
  MetricsReport tr = ComputeMetrics(test.y, pred);
  WriteJsonFile(Join(dirs.baseline, "metrics-valid.json"), ToJson(vr));
  WriteJsonFile(Join(dirs.baseline, "metrics-test.json"), ToJson(tr));
  WriteTextFile(Join(dirs.baseline, "metrics-test.txt"), FormatMetrics(tr));
  WritePredictions(Join(dirs.baseline, "predictions-test.tsv"), test_ids, test.y, pred);
  nlohmann::json settings = ToJson(c)["baseline"];
  settings["features"] = FeatureSetName(c.features);
  settings["selected"] = result.best_config;
  WriteRunManifest(dirs.baseline, "train-baseline", settings, c.baseline.seed,
                   {features_path, Join(dirs.split, "split.tsv")},
                   {"grid.tsv", "classifier.json", "metrics-valid.json", "metrics-test.json",
                    "metrics-test.txt", "predictions-test.tsv"});
  log << "selected " << result.best_config.dump() << "\n" << FormatMetrics(tr)
      << "train-baseline -> " << dirs.baseline << "\n";
  return dirs.baseline;
}

namespace {

struct MtlData {
  LoadedData data;
  std::array<std::vector<Example>, 3> examples;
  std::array<std::vector<const Utterance *>, 3> utterances;
};

void BuildExamples(MtlData *m) {
  for (const Utterance &u : m->data.corpus.utterances) {
    int p = static_cast<int>(m->data.PartitionOf(u));
    m->examples[p].push_back({&*u.audio, nullptr, m->data.SeverityOf(u), &u.transcript});
    m->utterances[p].push_back(&u);
  }
}

ModelCheckpoint LoadRunCheckpoint(const std::string &mtl_dir, const std::string &which,
                                  const ModelConfig &expected) {
  const std::string path = Join(mtl_dir, which + ".ckpt");
  Require(path, "train-mtl");
  ModelCheckpoint ckpt = LoadCheckpoint(path);
  if (ToJson(ckpt.config) != ToJson(expected))
    throw ValidationError("checkpoint " + path + " does not match the configured model");
  return ckpt;
}

}  // namespace

std::string CmdTrainMtl(const ExperimentConfig &c, std::ostream &log) {
  CorpusHash(c);
  StageDirs dirs = ResolveStageDirs(c);
  MtlData m{LoadData(c, dirs, true), {}, {}};
  BuildExamples(&m);
  ModelConfig mc = MakeModelConfig(c.model, VocabularySize(m.data.corpus));
  MtlModel model(mc);

  MakeDir(dirs.mtl);
  std::ofstream train_log(Join(dirs.mtl, "train.log"));
  struct Tee : std::streambuf {
    std::ostream *a, *b;
    int overflow(int ch) override {
      if (ch != EOF) {
        a->put(static_cast<char>(ch));
        b->put(static_cast<char>(ch));
      }
      return ch;
    }
    int sync() override {
      a->flush();
      b->flush();
      return 0;
    }
  } tee;
  tee.a = &log;
  tee.b = &train_log;
  std::ostream both(&tee);

  both << "train-mtl: " << m.examples[0].size() << " train, " << m.examples[1].size()
       << " valid utterances; alpha=" << c.train.alpha << " e=" << c.train.warmup_epochs
       << " epochs=" << c.train.epochs << " lr=" << c.train.lr << "\n";
  TrainOptions options;
  options.log = &both;
  options.record_wall_time = false;
  TrainResult r = Train(model, m.examples[0], m.examples[1], c.train, options);
  both.flush();

  SaveCheckpoint(Join(dirs.mtl, "best.ckpt"), r.best);
  SaveCheckpoint(Join(dirs.mtl, "final.ckpt"), r.final);
  WriteCurves(Join(dirs.mtl, "curves.tsv"), r.curves);
  WriteJsonFile(Join(dirs.mtl, "summary.json"),
                {{"best_epoch", r.best_epoch},
                 {"epochs", r.curves.epochs.size()},
                 {"best_valid_loss", r.curves.epochs[r.best_epoch - 1].valid_loss},
                 {"vocabulary_size", mc.vocabulary.size()}});
  nlohmann::json j = ToJson(c);
  WriteRunManifest(dirs.mtl, "train-mtl", {{"model", j["model"]}, {"train", j["train"]}},
                   c.train.seed,
                   {c.corpus.roster, c.corpus.manifest, Join(dirs.split, "split.tsv")},
                   {"best.ckpt", "final.ckpt", "curves.tsv", "summary.json"});
  log << "best epoch " << r.best_epoch << "\ntrain-mtl -> " << dirs.mtl << "\n";
  return dirs.mtl;
}

std::string CmdEvaluate(const ExperimentConfig &c, std::ostream &log) {
  CorpusHash(c);
  StageDirs dirs = ResolveStageDirs(c);
  const std::string which = c.evaluate.checkpoint;
  Require(Join(dirs.split, "split.tsv"), "split");
  Require(Join(dirs.mtl, which + ".ckpt"), "train-mtl");
  MtlData m{LoadData(c, dirs, true), {}, {}};
  BuildExamples(&m);
  ModelConfig mc = MakeModelConfig(c.model, VocabularySize(m.data.corpus));
  ModelCheckpoint ckpt = LoadRunCheckpoint(dirs.mtl, which, mc);
  MtlModel model(ckpt.config, ckpt.params);

  const int p = static_cast<int>(ParsePartition(c.evaluate.partition));
  if (m.examples[p].empty()) throw ValidationError("partition " + c.evaluate.partition + " is empty");
  std::vector<std::string> ids;
  std::vector<int> truth, pred;
  std::vector<Eigen::VectorXd> probs;
  for (std::size_t i = 0; i < m.examples[p].size(); ++i) {
    LatentSequence h = model.Encode(*m.examples[p][i].audio);
    Eigen::VectorXd q = model.SeverityProbabilities(h);
    Eigen::Index arg;
    q.maxCoeff(&arg);
    ids.push_back(m.utterances[p][i]->utterance_id);
    truth.push_back(m.examples[p][i].severity);
    pred.push_back(static_cast<int>(arg));
    probs.push_back(q);
  }
  MetricsReport report = ComputeMetrics(truth, pred);

  const std::string out = MakeDir(Join(dirs.mtl, "eval-" + which + "-" + c.evaluate.partition));
  nlohmann::json metrics = ToJson(report);
  metrics["checkpoint"] = which;
  metrics["checkpoint_epoch"] = ckpt.epoch;
  metrics["partition"] = c.evaluate.partition;
  WriteJsonFile(Join(out, "metrics.json"), metrics);
  WriteTextFile(Join(out, "metrics.txt"), FormatMetrics(report));
  WritePredictions(Join(out, "predictions.tsv"), ids, truth, pred, &probs);
  WriteRunManifest(out, "evaluate", ToJson(c)["evaluate"], c.train.seed,
                   {Join(dirs.mtl, which + ".ckpt"), Join(dirs.split, "split.tsv")},
                   {"metrics.json", "metrics.txt", "predictions.tsv"});
  log << FormatMetrics(report) << "evaluate -> " << out << "\n";
  return out;
}

std::string CmdAnalyze(const ExperimentConfig &c, std::ostream &log) {
  CorpusHash(c);
  StageDirs dirs = ResolveStageDirs(c);
  const std::string which = c.analyze.checkpoint;
  Require(Join(dirs.split, "split.tsv"), "split");
  Require(Join(dirs.mtl, which + ".ckpt"), "train-mtl");
  MtlData m{LoadData(c, dirs, true), {}, {}};
  BuildExamples(&m);
  ModelConfig mc = MakeModelConfig(c.model, VocabularySize(m.data.corpus));
  ModelCheckpoint ckpt = LoadRunCheckpoint(dirs.mtl, which, mc);
  MtlModel model(ckpt.config, ckpt.params);

  std::vector<LatentSource> sources;
  for (const std::string &name : c.analyze.partitions) {
    const int p = static_cast<int>(ParsePartition(name));
    for (std::size_t i = 0; i < m.examples[p].size(); ++i) {
      const Utterance &u = *m.utterances[p][i];
      sources.push_back({u.utterance_id, m.examples[p][i].severity, u.text_id, name,
                         m.examples[p][i].audio});
    }
  }
  LatentTable latents = ExportLatents(model, sources);
  if (latents.rows.size() < 3) throw ValidationError("analysis needs at least 3 utterances");
  Eigen::MatrixXd x = latents.Matrix();
  Eigen::MatrixXd coords = Embed2d(x, c.analyze.embedding);
  const int k = std::min<int>(c.analyze.neighbours, static_cast<int>(x.rows()) - 1);
  const double overlap = NeighbourOverlap(x, coords, k);

  std::vector<int> severity, text;
  for (const LatentRow &r : latents.rows) {
    severity.push_back(r.severity);
    text.push_back(r.text_id);
  }
  nlohmann::json sil = nlohmann::json::object();
  for (const auto &[label, labels] :
       {std::pair<std::string, const std::vector<int> *>{"severity", &severity},
        {"text_id", &text}}) {
    if (std::set<int>(labels->begin(), labels->end()).size() < 2) continue;
    sil["latent"][label] = ToJson(Silhouette(x, *labels, label));
    sil["embedding"][label] = ToJson(Silhouette(coords, *labels, label));
  }

  nlohmann::json settings = ToJson(c)["analyze"];
  const std::string out = MakeDir(
      Join(dirs.mtl, "analysis-" + which + "-" + Short(HashJson(settings))));
  WriteLatentTable(Join(out, "latents.tsv"), latents);
  WriteEmbedding(Join(out, "embedding.tsv"), latents, coords);
  WriteJsonFile(Join(out, "silhouette.json"), sil);
  WriteJsonFile(Join(out, "summary.json"), {{"rows", latents.rows.size()},
                                           {"dim", latents.dim()},
                                           {"checkpoint", which},
                                           {"checkpoint_epoch", ckpt.epoch},
                                           {"neighbours", k},
                                           {"neighbour_overlap", overlap}});
  WriteRunManifest(out, "analyze", settings, c.analyze.embedding.seed,
                   {Join(dirs.mtl, which + ".ckpt"), Join(dirs.split, "split.tsv")},
                   {"latents.tsv", "embedding.tsv", "silhouette.json", "summary.json"});
  for (const char *space : {"latent", "embedding"})
    for (const char *label : {"severity", "text_id"})
      if (sil.contains(space) && sil[space].contains(label))
        log << "silhouette " << space << "/" << label << " = "
            << FormatFixed(sil[space][label]["mean"].get<double>(), 4) << "\n";
  log << "neighbour overlap (" << k << "-NN) = " << FormatFixed(overlap, 4) << "\nanalyze -> "
      << out << "\n";
  return out;
}

std::string CmdCompare(const ExperimentConfig &c, const std::string &run_a,
                       const std::string &run_b, const std::string &out_dir, std::ostream &log) {
  TrainingCurves a = CurvesFrom(run_a, "train-mtl"), b = CurvesFrom(run_b, "train-mtl");
  CurveComparison cmp = CompareRuns(a, b);
  std::string out = out_dir;
  if (out.empty())
    out = Join(ResolveOutputRoot(c),
               "compare-" + Short(HashHex(CurvesToJson(a).dump() + CurvesToJson(b).dump())));
  MakeDir(out);
  WriteComparison(Join(out, "comparison.tsv"), cmp);
  nlohmann::json summary = ComparisonSummary(cmp);
  summary["a"] = run_a;
  summary["b"] = run_b;
  WriteJsonFile(Join(out, "summary.json"), summary);
  auto curves_path = [](const std::string &r) {
    return fs::is_directory(r) ? Join(r, "curves.tsv") : r;
  };
  WriteRunManifest(out, "compare", {{"a", run_a}, {"b", run_b}}, 0,
                   {curves_path(run_a), curves_path(run_b)}, {"comparison.tsv", "summary.json"});
  log << "argmin valid CE: a=" << cmp.argmin_valid_ce_a << " b=" << cmp.argmin_valid_ce_b
      << "\ncompare -> " << out << "\n";
  return out;
}

}  // namespace dmtl
