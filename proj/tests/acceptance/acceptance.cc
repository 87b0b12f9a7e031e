// tests/acceptance/acceptance.cc

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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 0 iff every
// gated criterion passes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "dmtl/cli/commands.h"
#include "dmtl/common/strings.h"
#include "dmtl/corpus/manifest.h"
#include "dmtl/evaluation/metrics.h"
#include "evaluation_oracles.h"
#include "model_oracles.h"

using namespace dmtl;
using namespace dmtl::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// In-memory synthetic corpus with a seeded ratio split.
struct SynthData {
  SynthCorpus corpus;
  std::vector<Example> train, valid;
  explicit SynthData(std::uint64_t seed) {
    SynthConfig c;
    c.seed = seed;
    corpus = GenerateSynthCorpus(c);
    SplitAssignment split = MakeSplit(corpus.roster, SplitRatios{}, seed);
    std::map<std::string, int> sev;
    for (const auto &s : corpus.roster) sev[s.speaker_id] = s.severity;
    for (const auto &u : corpus.utterances) {
      Example ex{&*u.audio, nullptr, sev[u.speaker_id], &u.transcript};
      Partition p = split.at(u.speaker_id);
      if (p == Partition::kTrain) train.push_back(ex);
      else if (p == Partition::kValid) valid.push_back(ex);
    }
  }
};

ModelConfig SynthModelConfig(std::uint64_t seed, bool ctc_head = true) {
  ModelSettings s;
  s.encoder.seed = seed;
  s.seed = seed;
  s.ctc_head = ctc_head;
  return MakeModelConfig(s, kSynthVocabularySize);
}

Outcome CtcOracle() {
  auto start = std::chrono::steady_clock::now();
  Rng rng(31);
  double worst = 0.0;
  long long instances = 0, unalignable = 0;
  bool consistent = true;
  for (int T = 1; T <= 4; ++T)
    for (int V = 1; V <= 3; ++V)
      for (int U = 0; U <= 2; ++U) {
        if (U > 0 && V < 2) continue;
        int combos = 1;
        for (int u = 0; u < U; ++u) combos *= V - 1;
        for (int code = 0; code < combos; ++code) {
          std::vector<int> target(U);
          for (int u = 0, c = code; u < U; ++u, c /= V - 1) target[u] = 1 + c % (V - 1);
          for (int trial = 0; trial < 100; ++trial) {
            Eigen::MatrixXd p = RandomRowStochastic(rng, T, V);
            double brute = BruteForceCtcProbability(p, target);
            if (brute == 0.0) {
              ++unalignable;
              try {
                CtcLoss(p, target);
                consistent = false;
              } catch (const CtcAlignmentError &) {
              }
              continue;
            }
            worst = std::max(worst, std::fabs(CtcLoss(p, target) + std::log(brute)));
            ++instances;
          }
        }
      }
  double secs = Seconds(start);
  return {worst <= 1e-6 && consistent && secs < 10.0,
          std::to_string(instances) + " instances (+" + std::to_string(unalignable) +
              " unalignable rejected), max |dLoss| = " + Sci(worst) + " (tol 1e-6), " +
              FormatFixed(secs, 2) + " s (limit 10 s)"};
}

Outcome GradientCheck() {
  auto start = std::chrono::steady_clock::now();
  MtlModel model(TinyModelConfig(11));
  RawAudio a = NoiseAudio(21, 100), b = NoiseAudio(22, 77);
  std::vector<int> ta = {0, 2, 2}, tb = {1, 0};
  std::vector<Example> batch = {{&a, nullptr, 3, &ta}, {&b, nullptr, 0, &tb}};
  double worst = 0.0;
  std::string where;
  long long checked = 0;
  for (bool ce : {false, true}) {
    LossWeights w{0.1, ce};
    ParameterSet grads;
    model.Compute(batch, w, &grads);
    GradientCheckResult r = CheckGradients(
        model.mutable_params(), grads, [&] { return model.Compute(batch, w, nullptr).combined; },
        1e-6);
    checked += r.checked;
    if (r.max_relative_error >= worst) {
      worst = r.max_relative_error;
      where = r.worst_parameter + (ce ? " (CE active)" : " (warmup)");
    }
  }
  double secs = Seconds(start);
  return {worst <= 1e-4 && secs < 60.0,
          std::to_string(checked) + " partials over both gate branches, max rel err = " +
              Sci(worst) + " at " + where + " (tol 1e-4), " + FormatFixed(secs, 1) +
              " s (limit 60 s)"};
}

Outcome WarmupInvariant() {
  SynthData data(0);
  MtlModel model(SynthModelConfig(0));
  const ParameterSet init = model.params();
  const std::size_t w = init.Index(MtlModel::kSeverityWeight),
                    bias = init.Index(MtlModel::kSeverityBias);
  TrainConfig tc;
  tc.epochs = 21;
  tc.warmup_epochs = 20;
  tc.lr = 1e-4;
  tc.seed = 0;
  bool frozen = true, moved = false;
  double grad_norm = 0.0;
  TrainOptions options;
  options.on_epoch = [&](int epoch, const MtlModel &m) {
    const bool same = m.params()[w] == init[w] && m.params()[bias] == init[bias];
    if (epoch <= 20) frozen = frozen && same;
    if (epoch == 20) {
      // Gradient the severity head would receive in the next (first CE) epoch.
      std::vector<Example> batch(data.train.begin(), data.train.begin() + tc.batch_size);
      ParameterSet grads;
      m.Compute(batch, {tc.alpha, true}, &grads);
      grad_norm = grads[w].norm() + grads[bias].norm();
    }
    if (epoch == 21) moved = !same;
  };
  Train(model, data.train, data.valid, tc, options);
  return {frozen && moved && grad_norm > 0.0,
          std::string("severity head bit-equal to init through epoch index 19: ") +
              (frozen ? "yes" : "no") + "; gradient norm entering epoch index 20 = " +
              Sci(grad_norm) + "; head updated in epoch index 20: " + (moved ? "yes" : "no")};
}

Outcome StlEquivalence() {
  SynthData data(0);
  TrainConfig tc;
  tc.epochs = 20;
  tc.warmup_epochs = 0;
  tc.alpha = 0.0;
  tc.lr = 1e-4;
  tc.seed = 0;
  MtlModel with_head(SynthModelConfig(0, true)), without(SynthModelConfig(0, false));
  TrainResult a = Train(with_head, data.train, data.valid, tc);
  TrainResult b = Train(without, data.train, data.valid, tc);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.curves.epochs.size(); ++i)
    worst = std::max({worst, std::fabs(a.curves.epochs[i].train_ce - b.curves.epochs[i].train_ce),
                      std::fabs(a.curves.epochs[i].valid_ce - b.curves.epochs[i].valid_ce)});
  bool lengths = a.curves.epochs.size() == 20 && b.curves.epochs.size() == 20;
  return {lengths && worst <= 1e-9,
          "20 epochs, max |dCE| (train and valid) = " + Sci(worst) + " (tol 1e-9)"};
}

Outcome SplitReproduction(const std::string &data_dir) {
  // Reference speakers per (severity, gender) cell: train, valid, test.
  const int expected[5][2][3] = {{{3, 1, 1}, {3, 1, 1}},  {{8, 3, 3}, {7, 2, 2}},
                                 {{10, 4, 4}, {4, 2, 2}}, {{4, 2, 2}, {2, 1, 1}},
                                 {{3, 1, 1}, {1, 0, 1}}};
  auto roster = LoadRoster(data_dir + "/qolt_roster.jsonl");
  SplitPlan plan = ReadSplitPlan(data_dir + "/qolt_split_plan.tsv");
  std::vector<Utterance> utts;
  for (const auto &s : roster)
    for (int text = 1; text <= 5; ++text)
      for (int rep = 1; rep <= 2; ++rep) {
        Utterance u;
        u.utterance_id = s.speaker_id + "_" + std::to_string(text) + "_" + std::to_string(rep);
        u.speaker_id = s.speaker_id;
        u.text_id = text;
        u.repetition = rep;
        utts.push_back(u);
      }
  SplitAssignment split = MakeSplit(roster, {}, 1, &plan);
  int mismatched = 0;
  std::map<std::string, std::set<Partition>> seen;
  for (const auto &[spk, p] : split) seen[spk].insert(p);
  int counts[5][2][3] = {};
  for (const auto &s : roster) {
    auto it = split.find(s.speaker_id);
    if (it == split.end()) continue;
    ++counts[s.severity][s.gender == Gender::kFemale][static_cast<int>(it->second)];
  }
  for (int k = 0; k < 5; ++k)
    for (int g = 0; g < 2; ++g)
      for (int p = 0; p < 3; ++p) mismatched += counts[k][g][p] != expected[k][g][p];
  int overlap = 0;
  for (const auto &[spk, ps] : seen) overlap += ps.size() > 1;
  SplitReport report = ValidateSplit(roster, split, utts);
  bool ok = mismatched == 0 && overlap == 0 && report.violations.empty() &&
            report.total_utterances() == 800 && split.size() == roster.size();
  return {ok, std::to_string(30 - mismatched) + "/30 cells match (train severe " +
                  std::to_string(counts[4][0][0]) + "M/" + std::to_string(counts[4][1][0]) +
                  "F, test severe " + std::to_string(counts[4][0][2]) + "M/" +
                  std::to_string(counts[4][1][2]) + "F), speaker overlap " +
                  std::to_string(overlap) + ", " + std::to_string(report.total_utterances()) +
                  " utterances"};
}

Outcome MetricsOracle() {
  Rng rng(77);
  double worst = 0.0;
  std::vector<int> t, p;
  for (int trial = 0; trial < 1000; ++trial) {
    RandomLabelPairs(rng, &t, &p);
    MetricsReport r = ComputeMetrics(t, p);
    OracleMetrics o = MetricsByDefinition(t, p);
    worst = std::max({worst, std::fabs(r.accuracy - o.accuracy),
                      std::fabs(r.macro_precision - o.precision),
                      std::fabs(r.macro_recall - o.recall), std::fabs(r.macro_f1 - o.f1)});
  }
  std::vector<int> wt = {0, 0, 1, 1, 2, 2}, wp = {0, 0, 0, 1, 2, 2};
  MetricsReport w = ComputeMetrics(wt, wp);
  std::string worked = FormatPercent(w.accuracy) + "/" + FormatPercent(w.macro_precision) + "/" +
                       FormatPercent(w.macro_recall) + "/" + FormatPercent(w.macro_f1);
  return {worst <= 1e-12 && worked == "83.33/88.89/83.33/82.22",
          "1000 random matrices, max |d| = " + Sci(worst) + " (tol 1e-12); worked example " +
              worked + " (expected 83.33/88.89/83.33/82.22)"};
}

Outcome SilhouetteOracle() {
  Rng rng(5);
  double worst = 0.0;
  int sets = 0;
  for (int n = 2; n <= 20; ++n)
    for (int trial = 0; trial < 50; ++trial) {
      int dim = 1 + static_cast<int>(UniformIndex(rng, 5));
      int k = 2 + static_cast<int>(UniformIndex(rng, std::min(n - 1, 5)));
      Eigen::MatrixXd x(n, dim);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = Gaussian(rng);
      if (trial % 10 == 0) x.row(n - 1) = x.row(0);  // coincident points
      std::vector<int> labels(n);
      for (int i = 0; i < n; ++i) labels[i] = i < k ? i : static_cast<int>(UniformIndex(rng, k));
      SilhouetteReport r = Silhouette(x, labels);
      std::vector<double> s = SilhouetteByDefinition(x, labels);
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(r.per_point[i] - s[i]));
      worst = std::max(worst, std::fabs(r.mean - Mean(s)));
      ++sets;
    }
  return {worst <= 1e-9,
          std::to_string(sets) + " random sets of 2-20 points, max |d| = " + Sci(worst) +
              " (tol 1e-9)"};
}

// Synthetic corpora, MTL/STL runs and their evaluations, one per seed.
struct SeedRun {
  std::uint64_t seed = 0;
  double mtl_accuracy = 0.0, stl_accuracy = 0.0;
  double mtl_seconds = 0.0;
  int mtl_argmin = 0, stl_argmin = 0;
  std::string error;
};

class Workspace {
 public:
  explicit Workspace(std::string root) : root_(std::move(root)) { fs::create_directories(root_); }

  std::string Corpus(std::uint64_t seed) {
    std::string dir = root_ + "/corpus-" + std::to_string(seed);
    if (!fs::exists(dir + "/manifest.jsonl")) {
      SynthConfig c;
      c.seed = seed;
      CmdSynth(c, dir, log_);
    }
    return dir;
  }

  ExperimentConfig Config(std::uint64_t seed) {
    ExperimentConfig c;
    std::string dir = Corpus(seed);
    c.corpus = {dir + "/roster.jsonl", dir + "/manifest.jsonl"};
    c.output_root = root_ + "/runs";
    c.split.seed = c.baseline.seed = c.model.seed = c.model.encoder.seed = c.train.seed = seed;
    return c;
  }

  std::ostream &log() { return log_; }

 private:
  std::string root_;
  std::ostringstream log_;
};

double ReadAccuracy(const std::string &dir) {
  std::ifstream in(dir + "/metrics.json");
  return nlohmann::json::parse(in)["accuracy"].get<double>();
}

SeedRun RunSeed(Workspace &ws, std::uint64_t seed) {
  SeedRun r;
  r.seed = seed;
  try {
    ExperimentConfig mtl = ws.Config(seed);
    mtl.train.epochs = 30;
    mtl.train.warmup_epochs = 5;
    mtl.train.alpha = 0.1;
    mtl.train.lr = 1e-4;
    CmdSplit(mtl, ws.log());
    auto start = std::chrono::steady_clock::now();
    std::string mtl_dir = CmdTrainMtl(mtl, ws.log());
    r.mtl_seconds = Seconds(start);
    r.mtl_accuracy = ReadAccuracy(CmdEvaluate(mtl, ws.log()));

    ExperimentConfig stl = mtl;
    stl.train.alpha = 0.0;
    stl.train.warmup_epochs = 0;
    std::string stl_dir = CmdTrainMtl(stl, ws.log());
    r.stl_accuracy = ReadAccuracy(CmdEvaluate(stl, ws.log()));

    std::string cmp = CmdCompare(mtl, stl_dir, mtl_dir, "", ws.log());
    std::ifstream in(cmp + "/summary.json");
    nlohmann::json s = nlohmann::json::parse(in);
    r.stl_argmin = s["argmin_valid_ce_a"].get<int>();
    r.mtl_argmin = s["argmin_valid_ce_b"].get<int>();
  } catch (const std::exception &e) {
    r.error = e.what();
  }
  std::cerr << "  seed " << seed << ": MTL acc " << FormatFixed(r.mtl_accuracy, 2) << "% in "
            << FormatFixed(r.mtl_seconds, 0) << " s, STL acc " << FormatFixed(r.stl_accuracy, 2)
            << "%, argmin valid CE MTL " << r.mtl_argmin << " / STL " << r.stl_argmin
            << (r.error.empty() ? "" : " ERROR " + r.error) << "\n";
  return r;
}

std::pair<Outcome, Outcome> EndToEnd(Workspace &ws) {
  std::vector<SeedRun> runs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) runs.push_back(RunSeed(ws, seed));
  int passing = 0, later = 0;
  bool fast = true, errors = false;
  std::string accs, epochs;
  for (const SeedRun &r : runs) {
    passing += r.error.empty() && r.mtl_accuracy >= 60.0;
    later += r.error.empty() && r.mtl_argmin >= r.stl_argmin;
    fast = fast && r.mtl_seconds < 900.0;
    errors = errors || !r.error.empty();
    accs += (accs.empty() ? "" : ", ") + FormatFixed(r.mtl_accuracy, 2);
    epochs += (epochs.empty() ? "" : ", ") + std::to_string(r.mtl_argmin) + " vs " +
              std::to_string(r.stl_argmin);
  }
  double slowest = 0.0;
  for (const SeedRun &r : runs) slowest = std::max(slowest, r.mtl_seconds);
  Outcome e2e{!errors && passing >= 3 && fast,
              "test accuracy per seed [" + accs + "] %, " + std::to_string(passing) +
                  "/5 seeds >= 60% (need 3); slowest train-mtl " + FormatFixed(slowest, 0) +
                  " s (limit 900 s)"};
  Outcome trend{!errors && later >= 3,
                "argmin valid-CE epoch MTL vs STL per seed [" + epochs + "], MTL >= STL in " +
                    std::to_string(later) + "/5 seeds (reported, not gated)"};
  return {e2e, trend};
}

Outcome BaselinePipeline(Workspace &ws) {
  ExperimentConfig c = ws.Config(0);
  c.baseline.family = Family::kSvm;
  CmdSplit(c, ws.log());
  CmdExtractFeatures(c, ws.log());
  std::string dir = CmdTrainBaseline(c, ws.log());
  std::ifstream run_in(dir + "/run.json");
  nlohmann::json selected = nlohmann::json::parse(run_in)["config"]["selected"];

  // Exhaustive enumeration over the same grid, independent of GridSearch.
  StageDirs dirs = ResolveStageDirs(c);
  FeatureTable table = ReadFeatureTable(dirs.features + "/features.tsv");
  dmtl::Corpus corpus = LoadCorpus(c.corpus.roster, c.corpus.manifest, false);
  SplitAssignment split = ReadSplit(dirs.split + "/split.tsv");
  std::map<std::string, std::string> speaker_of;
  for (const auto &u : corpus.utterances) speaker_of[u.utterance_id] = u.speaker_id;
  std::map<std::string, int> sev;
  for (const auto &s : corpus.roster) sev[s.speaker_id] = s.severity;
  LabelledData train, valid;
  std::vector<std::vector<double>> tx, vx;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string &spk = speaker_of.at(table.utterance_ids[i]);
    Partition p = split.at(spk);
    if (p == Partition::kTrain) {
      tx.push_back(table.rows[i].values);
      train.y.push_back(sev[spk]);
    } else if (p == Partition::kValid) {
      vx.push_back(table.rows[i].values);
      valid.y.push_back(sev[spk]);
    }
  }
  auto to_matrix = [](const std::vector<std::vector<double>> &rows) {
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < rows[r].size(); ++j) m(r, j) = rows[r][j];
    return m;
  };
  train.x = to_matrix(tx);
  valid.x = to_matrix(vx);
  std::vector<nlohmann::json> configs;
  const double decades[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  for (double cc : decades)
    for (double g : decades) configs.push_back({{"C", cc}, {"gamma", g}});
  nlohmann::json expected;
  double best = -1.0;
  for (const nlohmann::json &cfg : configs) {
    ClassifierModel m = TrainClassifier(Family::kSvm, cfg, train, &valid, c.baseline.seed);
    double f1 = ComputeMetrics(valid.y, PredictRows(m, valid.x)).macro_f1;
    // Ties go to the smaller configuration, comparing C first, then gamma.
    bool smaller = expected.is_null() ||
                   cfg["C"].get<double>() < expected["C"].get<double>() ||
                   (cfg["C"].get<double>() == expected["C"].get<double>() &&
                    cfg["gamma"].get<double>() < expected["gamma"].get<double>());
    if (f1 > best || (f1 == best && smaller)) {
      best = f1;
      expected = cfg;
    }
  }
  const bool grid_ok = selected == expected && configs.size() == 81;

  auto rejects = [&](Family f, const nlohmann::json &cfg) {
    try {
      TrainClassifier(f, cfg, train, &valid, 0);
      return false;
    } catch (const ValidationError &) {
      return true;
    }
  };
  auto accepts = [&](Family f, const nlohmann::json &cfg) {
    try {
      TrainClassifier(f, cfg, train, &valid, 0);
      return true;
    } catch (const std::exception &) {
      return false;
    }
  };
  const bool depth_ok = rejects(Family::kGbdt, {{"max_depth", 2}}) &&
                        rejects(Family::kGbdt, {{"max_depth", 6}}) &&
                        accepts(Family::kGbdt, {{"max_depth", 3}}) &&
                        accepts(Family::kGbdt, {{"max_depth", 5}});
  const bool layers_ok = rejects(Family::kMlp, {{"hidden_layers", 0}}) &&
                         rejects(Family::kMlp, {{"hidden_layers", 11}}) &&
                         accepts(Family::kMlp, {{"hidden_layers", 1}}) &&
                         accepts(Family::kMlp, {{"hidden_layers", 10}});
  return {grid_ok && depth_ok && layers_ok,
          "SVM grid 9x9 selected " + selected.dump() + ", exhaustive argmax " + expected.dump() +
              " (valid macro F1 " + FormatPercent(best) + "); GBDT depth 2/6 rejected, 3/5 accepted: " +
              (depth_ok ? "yes" : "no") + "; MLP layers 0/11 rejected, 1/10 accepted: " +
              (layers_ok ? "yes" : "no")};
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"acceptance checks"};
  std::string workdir, data_dir = DMTL_DATA_DIR;
  std::vector<std::string> only;
  bool keep = false;
  app.add_option("--workdir", workdir, "scratch directory (default: a fresh temporary one)");
  app.add_option("--data", data_dir, "directory with the QoLT-shaped roster and split plan");
  app.add_option("--only", only, "run just these criteria");
  app.add_flag("--keep", keep, "keep the scratch directory");
  CLI11_PARSE(app, argc, argv);

  bool temporary = workdir.empty();
  if (temporary) {
    std::string tmpl = (fs::temp_directory_path() / "dmtl-acceptance-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) {
      std::cerr << "cannot create a scratch directory\n";
      return 2;
    }
    workdir = tmpl;
  }
  Workspace ws(workdir);

  std::optional<std::pair<Outcome, Outcome>> e2e;
  auto end_to_end = [&]() -> std::pair<Outcome, Outcome> & {
    if (!e2e) e2e = EndToEnd(ws);
    return *e2e;
  };
  struct Criterion {
    std::string name;
    bool gated;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria = {
      {"ctc-oracle", true, CtcOracle},
      {"gradient-check", true, GradientCheck},
      {"warmup-invariant", true, WarmupInvariant},
      {"stl-equivalence", true, StlEquivalence},
      {"split-reproduction", true, [&] { return SplitReproduction(data_dir); }},
      {"metrics-oracle", true, MetricsOracle},
      {"silhouette-oracle", true, SilhouetteOracle},
      {"end-to-end", true, [&] { return end_to_end().first; }},
      {"regularization-trend", false, [&] { return end_to_end().second; }},
      {"baseline-pipeline", true, [&] { return BaselinePipeline(ws); }},
  };

  int failed = 0;
  for (const Criterion &c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass && c.gated) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << (c.gated ? "  " : "* ") << c.name << ": "
              << o.detail << " [" << FormatFixed(Seconds(start), 1) << " s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all gated criteria passed" : std::to_string(failed) +
                                                                 " gated criteria failed")
            << " (* = reported only)" << std::endl;
  if (temporary && !keep) fs::remove_all(workdir);
  return failed == 0 ? 0 : 1;
}
