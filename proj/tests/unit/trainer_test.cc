// tests/unit/trainer_test.cc

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

#include <cmath>
#include <limits>
#include <sstream>

#include "dmtl/trainer/trainer.h"
#include "model_oracles.h"
#include "test_util.h"

using namespace dmtl;
using namespace dmtl::testing;

namespace {

// Small labelled set whose audio loudness tracks the label.
struct TinyData {
  std::vector<RawAudio> audio;
  std::vector<std::vector<int>> transcripts;
  std::vector<Example> train, valid;

  explicit TinyData(std::uint64_t seed, int n_train = 10, int n_valid = 5) {
    const int n = n_train + n_valid;
    audio.reserve(n);
    transcripts.reserve(n);
    for (int i = 0; i < n; ++i) {
      int label = i % 5;
      audio.push_back(NoiseAudio(seed * 1000 + i, 90 + 7 * (i % 4), 0.1 + 0.2 * label));
      transcripts.push_back({i % 3, (i + 1) % 3});
    }
    for (int i = 0; i < n; ++i) {
      Example ex{&audio[i], nullptr, i % 5, &transcripts[i]};
      (i < n_train ? train : valid).push_back(ex);
    }
  }
};

TrainConfig FastConfig(int epochs, int warmup, double alpha) {
  TrainConfig c;
  c.lr = 1e-2;
  c.epochs = epochs;
  c.warmup_epochs = warmup;
  c.alpha = alpha;
  c.seed = 17;
  return c;
}

void CheckSameCurves(const TrainingCurves &a, const TrainingCurves &b) {
  REQUIRE(a.epochs.size() == b.epochs.size());
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    const EpochRecord &x = a.epochs[i], &y = b.epochs[i];
    CHECK(x.train_ce == y.train_ce);
    CHECK(x.train_ctc == y.train_ctc);
    CHECK(x.train_loss == y.train_loss);
    CHECK(x.valid_ce == y.valid_ce);
    CHECK(x.valid_ctc == y.valid_ctc);
    CHECK(x.valid_loss == y.valid_loss);
    CHECK(x.skipped == y.skipped);
  }
}

}  // namespace

TEST_CASE("default optimisation settings") {
  TrainConfig c;
  CHECK(c.lr == 2e-5);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.98);
  CHECK(c.eps == 1e-8);
  CHECK(c.batch_size == 4);
  CHECK(c.epochs == 100);
  CHECK(c.alpha == 0.1);
  CHECK(c.warmup_epochs == 0);
  CHECK_NOTHROW(c.Validate());

  TrainConfig bad = c;
  bad.warmup_epochs = 101;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = c;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = c;
  bad.lr = 0;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);

  c.warmup_epochs = 20;
  c.seed = 12345678901234ULL;
  nlohmann::json j = ToJson(c);
  CHECK(ToJson(TrainConfigFromJson(j)) == j);
  j["momentum"] = 0.5;
  CHECK_THROWS_AS(TrainConfigFromJson(j), ValidationError);
}

TEST_CASE("Adam matches a scalar oracle") {
  TrainConfig c;
  c.lr = 0.05;
  ParameterSet p;
  p.Add("x", Eigen::MatrixXd::Constant(1, 1, 0.7));
  AdamState s = InitAdam(p);
  const double gs[] = {0.3, -1.2, 4.0, 0.0, 1e-3, -0.5};
  double x = 0.7, m = 0, v = 0;
  for (int t = 1; t <= 6; ++t) {
    double g = gs[t - 1];
    ParameterSet grad;
    grad.Add("x", Eigen::MatrixXd::Constant(1, 1, g));
    AdamStep(p, grad, s, c);
    m = 0.9 * m + 0.1 * g;
    v = 0.98 * v + 0.02 * g * g;
    double mhat = m / (1 - std::pow(0.9, t)), vhat = v / (1 - std::pow(0.98, t));
    x -= 0.05 * mhat / (std::sqrt(vhat) + 1e-8);
    CHECK(p[0](0, 0) == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK(s.step == 6);

  // First step moves by lr * g / (|g| + eps).
  ParameterSet q;
  q.Add("x", Eigen::MatrixXd::Zero(1, 1));
  AdamState sq = InitAdam(q);
  ParameterSet g;
  g.Add("x", Eigen::MatrixXd::Constant(1, 1, 2.0));
  AdamStep(q, g, sq, c);
  CHECK(q[0](0, 0) == doctest::Approx(-0.05 * 2.0 / (2.0 + 1e-8)).epsilon(1e-14));
}

TEST_CASE("Adam with zero gradient leaves everything unchanged") {
  TrainConfig c;
  ParameterSet p;
  p.Add("w", Eigen::MatrixXd::Random(3, 2));
  ParameterSet before = p;
  AdamState s = InitAdam(p);
  AdamStep(p, p.ZerosLike(), s, c);
  CHECK(p == before);
  CHECK(s.m == p.ZerosLike());
  CHECK(s.v == p.ZerosLike());
}

TEST_CASE("Adam minimises a quadratic") {
  TrainConfig c;
  c.lr = 0.1;
  ParameterSet p;
  p.Add("x", Eigen::MatrixXd::Zero(1, 1));
  AdamState s = InitAdam(p);
  for (int i = 0; i < 500; ++i) {
    ParameterSet g;
    g.Add("x", Eigen::MatrixXd::Constant(1, 1, 2.0 * (p[0](0, 0) - 3.0)));
    AdamStep(p, g, s, c);
  }
  CHECK(std::fabs(p[0](0, 0) - 3.0) < 1e-2);
}

TEST_CASE("non-finite gradients abort before any update") {
  TrainConfig c;
  ParameterSet p;
  p.Add("w", Eigen::MatrixXd::Ones(2, 2));
  ParameterSet before = p;
  AdamState s = InitAdam(p);
  ParameterSet g = p.ZerosLike();
  g[0](1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(AdamStep(p, g, s, c), TrainingError);
  CHECK(p == before);
  CHECK(s.step == 0);
}

TEST_CASE("global norm clipping") {
  ParameterSet g;
  g.Add("a", Eigen::MatrixXd::Constant(1, 1, 3.0));
  g.Add("b", Eigen::MatrixXd::Constant(1, 1, 4.0));
  CHECK(ClipGlobalNorm(g, 1.0) == doctest::Approx(5.0));
  CHECK(g[0](0, 0) == doctest::Approx(0.6));
  CHECK(g[1](0, 0) == doctest::Approx(0.8));
  ParameterSet h = g;
  ClipGlobalNorm(h, 5.0);
  CHECK(h == g);
}

TEST_CASE("best epoch selection") {
  std::vector<double> a = {5, 3, 4};
  CHECK(SelectBestEpoch(a, 0) == 2);
  std::vector<double> b = {1, 9, 9};
  CHECK(SelectBestEpoch(b, 0) == 1);
  CHECK(SelectBestEpoch(b, 1) == 2);  // epoch 1 excluded, tie goes to the earlier
  std::vector<double> c = {4, 3, 2, 1};
  CHECK(SelectBestEpoch(c, 0) == 4);
  CHECK_THROWS_AS(SelectBestEpoch(c, 4), ValidationError);
  std::vector<double> none;
  CHECK_THROWS_AS(SelectBestEpoch(none, 0), ValidationError);

  // Eligibility-filter oracle over random sequences.
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(UniformIndex(rng, 8));
    std::vector<double> v(n);
    for (double &x : v) x = static_cast<double>(UniformIndex(rng, 4));
    int e = static_cast<int>(UniformIndex(rng, n));
    int expected = -1;
    for (int k = e + 1; k <= n; ++k)
      if (expected < 0 || v[k - 1] < v[expected - 1]) expected = k;
    CHECK(SelectBestEpoch(v, e) == expected);
  }
}

TEST_CASE("curves file round-trip") {
  TempDir dir;
  TrainingCurves c;
  for (int i = 1; i <= 3; ++i)
    c.epochs.push_back({i, 1.0 / i, 2.0 / 3.0, 0.1 * i, 1.5, 2.5e-7, 3.0 + i, 0.125, i - 1});
  WriteCurves(dir.file("c.tsv"), c);
  TrainingCurves back = ReadCurves(dir.file("c.tsv"));
  CheckSameCurves(c, back);
  CHECK(back.epochs[2].wall_seconds == 0.125);
  CHECK(ReadText(dir.file("c.tsv")).rfind(
            "epoch\ttrain_ce\ttrain_ctc\ttrain_loss\tvalid_ce\tvalid_ctc\tvalid_loss", 0) == 0);
  WriteText(dir.file("bad.tsv"), "epoch\tx\n");
  CHECK_THROWS_AS(ReadCurves(dir.file("bad.tsv")), ParseError);
}

TEST_CASE("training produces complete curves and a best checkpoint") {
  TinyData data(1);
  MtlModel model(TinyModelConfig(4));
  std::ostringstream log;
  TrainOptions opts;
  opts.log = &log;
  TrainResult r = Train(model, data.train, data.valid, FastConfig(6, 2, 0.1), opts);
  CHECK(r.complete);
  REQUIRE(r.curves.epochs.size() == 6);
  CHECK_NOTHROW(r.curves.Validate());
  CHECK(r.best_epoch == SelectBestEpoch(r.curves.valid_loss(), 2));
  CHECK(r.best_epoch >= 3);
  CHECK(r.best.epoch == r.best_epoch);
  CHECK(r.final.epoch == 6);
  CHECK(r.final.params == model.params());
  CHECK(log.str().find("epoch 1/6 (warmup)") != std::string::npos);
  CHECK(log.str().find("epoch 6/6 train") != std::string::npos);
  // Warmup epochs report alpha * CTC only.
  const EpochRecord &w = r.curves.epochs[0];
  CHECK(w.valid_loss == doctest::Approx(0.1 * w.valid_ctc));
}

TEST_CASE("warmup through every epoch falls back to the final epoch") {
  TinyData data(2);
  MtlModel model(TinyModelConfig(4));
  TrainResult r = Train(model, data.train, data.valid, FastConfig(3, 3, 0.1));
  CHECK(r.best_epoch == 3);
  CHECK(r.best.params == r.final.params);
}

TEST_CASE("warmup gate keeps the severity head at initialisation") {
  TinyData data(3);
  MtlModel model(TinyModelConfig(6));
  const ParameterSet init = model.params();
  const std::size_t w = init.Index(MtlModel::kSeverityWeight);
  const std::size_t b = init.Index(MtlModel::kSeverityBias);
  const std::size_t enc = 0;
  int checked = 0;
  TrainOptions opts;
  opts.on_epoch = [&](int epoch, const MtlModel &m) {
    if (epoch <= 3) {
      CHECK(m.params()[w] == init[w]);
      CHECK(m.params()[b] == init[b]);
      CHECK(m.params()[enc] != init[enc]);
      ++checked;
    } else {
      CHECK(m.params()[w] != init[w]);
    }
  };
  Train(model, data.train, data.valid, FastConfig(4, 3, 0.1), opts);
  CHECK(checked == 3);
}

TEST_CASE("training is deterministic") {
  TinyData data(4);
  MtlModel a(TinyModelConfig(8)), b(TinyModelConfig(8));
  TrainResult ra = Train(a, data.train, data.valid, FastConfig(4, 1, 0.1));
  TrainResult rb = Train(b, data.train, data.valid, FastConfig(4, 1, 0.1));
  CheckSameCurves(ra.curves, rb.curves);
  CHECK(ra.final.params == rb.final.params);
  CHECK(ra.best.params == rb.best.params);

  MtlModel c(TinyModelConfig(8));
  TrainConfig other = FastConfig(4, 1, 0.1);
  other.seed = 18;
  TrainResult rc = Train(c, data.train, data.valid, other);
  CHECK(rc.final.params != ra.final.params);
}

TEST_CASE("resuming from a saved checkpoint equals an uninterrupted run") {
  TempDir dir;
  TinyData data(5);
  TrainConfig cfg = FastConfig(6, 2, 0.1);
  MtlModel straight(TinyModelConfig(9));
  TrainResult full = Train(straight, data.train, data.valid, cfg);

  MtlModel staged(TinyModelConfig(9));
  TrainOptions half;
  half.stop_after = 3;
  TrainResult first = Train(staged, data.train, data.valid, cfg, half);
  CHECK_FALSE(first.complete);
  CHECK(first.curves.epochs.size() == 3);
  SaveCheckpoint(dir.file("state.ckpt"), first.final);
  TrainResult second = Resume(LoadCheckpoint(dir.file("state.ckpt")), data.train, data.valid);
  CHECK(second.complete);
  CheckSameCurves(full.curves, second.curves);
  CHECK(second.final.params == full.final.params);
  CHECK(second.best_epoch == full.best_epoch);
  CHECK(second.best.params == full.best.params);

  ModelCheckpoint bare;
  bare.config = TinyModelConfig(9);
  bare.params = MtlModel(bare.config).params();
  CHECK_THROWS_AS(Resume(bare, data.train, data.valid), ValidationError);
}

TEST_CASE("alpha 0 reproduces training without a CTC head") {
  TinyData data(6);
  ModelConfig with = TinyModelConfig(10);
  ModelConfig without = with;
  without.ctc_head = false;
  MtlModel a(with), b(without);
  for (std::size_t i = 0; i < b.params().size(); ++i)
    CHECK(b.params()[i] == a.params()[a.params().Index(b.params().name(i))]);
  TrainResult ra = Train(a, data.train, data.valid, FastConfig(5, 0, 0.0));
  TrainResult rb = Train(b, data.train, data.valid, FastConfig(5, 0, 0.0));
  for (int e = 0; e < 5; ++e) {
    CHECK(std::fabs(ra.curves.epochs[e].train_ce - rb.curves.epochs[e].train_ce) <= 1e-9);
    CHECK(std::fabs(ra.curves.epochs[e].valid_ce - rb.curves.epochs[e].valid_ce) <= 1e-9);
  }
  CHECK_THROWS_AS(Train(b, data.train, data.valid, FastConfig(2, 0, 0.1)), TrainingError);
}

TEST_CASE("training input errors") {
  TinyData data(7);
  MtlModel model(TinyModelConfig(11));
  std::vector<Example> none;
  CHECK_THROWS_AS(Train(model, none, data.valid, FastConfig(1, 0, 0.1)), TrainingError);
  CHECK_THROWS_AS(Train(model, data.train, none, FastConfig(1, 0, 0.1)), TrainingError);

  RawAudio tiny = NoiseAudio(1, 24);
  std::vector<int> longer = {0, 1, 2, 0, 1};
  std::vector<Example> hopeless(4, Example{&tiny, nullptr, 1, &longer});
  TrainConfig cfg = FastConfig(1, 0, 0.1);
  CHECK_THROWS_AS(Train(model, hopeless, data.valid, cfg), TrainingError);
}
