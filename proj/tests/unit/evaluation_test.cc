// tests/unit/evaluation_test.cc

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

#include <algorithm>
#include <cmath>
#include <map>

#include "dmtl/evaluation/analysis.h"
#include "dmtl/evaluation/metrics.h"
#include "evaluation_oracles.h"
#include "model_oracles.h"
#include "test_util.h"

using namespace dmtl;
using namespace dmtl::testing;

TEST_CASE("confusion matrix cases") {
  std::vector<int> t = {0, 0, 1}, p = {0, 1, 1};
  ConfusionMatrix cm = Confusion(t, p);
  CHECK(cm.counts[0][0] == 1);
  CHECK(cm.counts[0][1] == 1);
  CHECK(cm.counts[1][1] == 1);
  CHECK(cm.total() == 3);
  CHECK(cm.row_sum(0) == 2);
  CHECK(cm.col_sum(1) == 2);

  std::vector<int> all = {0, 1, 2, 3, 4, 4};
  ConfusionMatrix perfect = Confusion(all, all);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK((i == j) == (perfect.counts[i][j] > 0));
  MetricsReport r = MacroMetrics(perfect);
  CHECK(FormatPercent(r.accuracy) == "100.00");
  CHECK(FormatPercent(r.macro_precision) == "100.00");
  CHECK(FormatPercent(r.macro_recall) == "100.00");
  CHECK(FormatPercent(r.macro_f1) == "100.00");

  std::vector<int> bad = {7};
  std::vector<int> ok = {0};
  CHECK_THROWS(Confusion(bad, ok));
  CHECK_THROWS(Confusion(ok, bad));
  std::vector<int> two = {0, 1};
  CHECK_THROWS(Confusion(ok, two));
  CHECK_THROWS(Confusion(std::vector<int>{}, std::vector<int>{}));
}

TEST_CASE("worked three-class example") {
  // Rows [[2,0,0],[1,1,0],[0,0,2]].
  std::vector<int> t = {0, 0, 1, 1, 2, 2}, p = {0, 0, 0, 1, 2, 2};
  MetricsReport r = ComputeMetrics(t, p);
  CHECK(FormatPercent(r.accuracy) == "83.33");
  CHECK(FormatPercent(r.macro_precision) == "88.89");
  CHECK(FormatPercent(r.macro_recall) == "83.33");
  CHECK(FormatPercent(r.macro_f1) == "82.22");
  CHECK(r.macro_precision == doctest::Approx((2.0 / 3 + 1 + 1) / 3).epsilon(1e-15));
  CHECK(r.macro_f1 == doctest::Approx((0.8 + 2.0 / 3 + 1) / 3).epsilon(1e-15));
  nlohmann::json j = ToJson(r);
  CHECK(j["accuracy"].get<double>() == 83.33);
  CHECK(j["f1_macro"].get<double>() == 82.22);
  CHECK(RenderMetricsTable(r).find("88.89") != std::string::npos);
}

TEST_CASE("metrics match the definition on random matrices") {
  Rng rng(2024);
  double worst = 0.0;
  std::vector<int> t, p;
  for (int trial = 0; trial < 1000; ++trial) {
    RandomLabelPairs(rng, &t, &p);
    MetricsReport r = ComputeMetrics(t, p);
    OracleMetrics o = MetricsByDefinition(t, p);
    worst = std::max({worst, std::fabs(r.accuracy - o.accuracy),
                      std::fabs(r.macro_precision - o.precision),
                      std::fabs(r.macro_recall - o.recall), std::fabs(r.macro_f1 - o.f1)});

    // Jointly permuting the pairs changes nothing.
    std::vector<std::size_t> perm(t.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> tp(t.size()), pp(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      tp[i] = t[perm[i]];
      pp[i] = p[perm[i]];
    }
    MetricsReport q = ComputeMetrics(tp, pp);
    CHECK(q.accuracy == r.accuracy);
    CHECK(q.macro_precision == r.macro_precision);
    CHECK(q.macro_recall == r.macro_recall);
    CHECK(q.macro_f1 == r.macro_f1);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("absent classes are excluded and unpredicted classes score zero precision") {
  std::vector<int> t = {0, 0, 3, 3}, p = {0, 0, 0, 0};
  MetricsReport r = ComputeMetrics(t, p);
  CHECK(r.per_class[3].precision == 0.0);
  CHECK(r.macro_recall == doctest::Approx(0.5));
  CHECK(r.macro_precision == doctest::Approx(0.25));
}

TEST_CASE("silhouette matches the definition") {
  Rng rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 400; ++trial) {
    int n = 2 + static_cast<int>(UniformIndex(rng, 19));
    int dim = 1 + static_cast<int>(UniformIndex(rng, 4));
    int k = 2 + static_cast<int>(UniformIndex(rng, std::min(n - 1, 4)));
    Eigen::MatrixXd x(n, dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = Gaussian(rng);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i < k ? i : static_cast<int>(UniformIndex(rng, k));
    SilhouetteReport r = Silhouette(x, labels);
    std::vector<double> s = SilhouetteByDefinition(x, labels);
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::fabs(r.per_point[i] - s[i]));
      CHECK(r.per_point[i] >= -1.0);
      CHECK(r.per_point[i] <= 1.0);
    }
    worst = std::max(worst, std::fabs(r.mean - Mean(s)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("silhouette cases") {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 10, 0, 10, 1;
  std::vector<int> labels = {0, 0, 1, 1};
  SilhouetteReport r = Silhouette(x, labels, "severity");
  // a = 1, b = (10 + sqrt(101)) / 2 for every point.
  double b = (10 + std::sqrt(101.0)) / 2;
  for (double s : r.per_point) CHECK(s == doctest::Approx(1 - 1 / b).epsilon(1e-12));
  CHECK(r.mean > 0.9);
  CHECK(r.per_cluster.size() == 2);
  CHECK(ToJson(r)["labelling"] == "severity");

  Eigen::MatrixXd same = Eigen::MatrixXd::Ones(4, 3);
  CHECK(Silhouette(same, labels).mean == 0.0);

  std::vector<int> singleton = {0, 0, 0, 1};
  CHECK(Silhouette(x, singleton).per_point[3] == 0.0);

  std::vector<int> one = {2, 2, 2, 2};
  CHECK_THROWS_AS(Silhouette(x, one), ValidationError);
  std::vector<int> short_labels = {0, 1};
  CHECK_THROWS(Silhouette(x, short_labels));
}

TEST_CASE("embedding preserves blob structure") {
  std::vector<int> labels;
  Eigen::MatrixXd x = Blobs(5, 50, 3, 8, 10.0, &labels);
  EmbeddingConfig config;
  config.seed = 3;
  Eigen::MatrixXd y = Embed2d(x, config);
  REQUIRE(y.rows() == 150);
  REQUIRE(y.cols() == 2);
  CHECK(y.allFinite());

  // Majority label among the 10 nearest embedded neighbours.
  int kept = 0;
  for (int i = 0; i < 150; ++i) {
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < 150; ++j)
      if (j != i) d.push_back({(y.row(i) - y.row(j)).squaredNorm(), j});
    std::partial_sort(d.begin(), d.begin() + 10, d.end());
    std::map<int, int> votes;
    for (int m = 0; m < 10; ++m) ++votes[labels[d[m].second]];
    auto best = std::max_element(votes.begin(), votes.end(),
                                 [](auto &a, auto &b) { return a.second < b.second; });
    kept += best->first == labels[i];
  }
  CHECK(kept >= 143);
  CHECK(NeighbourOverlap(x, y, 10) >= 0.3);

  Eigen::MatrixXd again = Embed2d(x, config);
  CHECK((again.array() == y.array()).all());
}

TEST_CASE("embedding degenerate inputs") {
  CHECK_THROWS_AS(Embed2d(Eigen::MatrixXd::Zero(2, 3)), ValidationError);

  Eigen::MatrixXd same = Eigen::MatrixXd::Constant(5, 3, 0.25);
  Eigen::MatrixXd y = Embed2d(same);
  for (int i = 1; i < 5; ++i) CHECK(y.row(i) == y.row(0));

  std::vector<int> labels;
  Eigen::MatrixXd x = Blobs(8, 10, 2, 3, 10.0, &labels);
  x.row(7) = x.row(2);
  x.row(15) = x.row(2);
  EmbeddingConfig c;
  c.iterations = 300;
  Eigen::MatrixXd e = Embed2d(x, c);
  CHECK(e.row(7) == e.row(2));
  CHECK(e.row(15) == e.row(2));
  CHECK(e.allFinite());

  Eigen::MatrixXd pair(4, 2);
  pair << 0, 0, 1, 1, 0, 0, 1, 1;
  Eigen::MatrixXd q = Embed2d(pair);
  CHECK(q.row(0) == q.row(2));
  CHECK(q.row(0) != q.row(1));

  CHECK_THROWS(NeighbourOverlap(x, e.topRows(3), 2));
  CHECK_THROWS(NeighbourOverlap(x, e, 0));
  CHECK(NeighbourOverlap(x, x, 5) == 1.0);
}

TEST_CASE("latent export") {
  MtlModel model(TinyModelConfig(4));
  std::vector<RawAudio> audio;
  for (int i = 0; i < 8; ++i) audio.push_back(NoiseAudio(300 + i, 200 + 10 * i, 0.5));
  RawAudio flat;
  flat.samples.assign(240, 0.3);
  audio.push_back(flat);
  audio.push_back(flat);
  std::vector<LatentSource> sources;
  for (int i = 0; i < 10; ++i)
    sources.push_back({"u" + std::to_string(i), i % 5, 1 + i % 3, i < 6 ? "train" : "test",
                       &audio[i]});
  LatentTable a = ExportLatents(model, sources);
  REQUIRE(a.rows.size() == 10);
  CHECK(a.dim() == model.config().encoder.feature_dim);
  LatentTable b = ExportLatents(model, sources);
  CHECK((a.Matrix().array() == b.Matrix().array()).all());
  CHECK((a.rows[8].pooled - a.rows[9].pooled).cwiseAbs().maxCoeff() <= 1e-9);

  TempDir dir;
  WriteLatentTable(dir.file("latents.tsv"), a);
  LatentTable c = ReadLatentTable(dir.file("latents.tsv"));
  REQUIRE(c.rows.size() == 10);
  CHECK(c.rows[3].utterance_id == "u3");
  CHECK(c.rows[3].severity == 3);
  CHECK(c.rows[3].text_id == 1);
  CHECK(c.rows[7].partition == "test");
  CHECK((c.Matrix().array() == a.Matrix().array()).all());

  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(10, 2);
  WriteEmbedding(dir.file("emb.tsv"), a, coords);
  CHECK(ReadText(dir.file("emb.tsv")).rfind("utterance_id\tseverity\ttext_id\tpartition\tx\ty\n", 0) == 0);
  CHECK_THROWS(WriteEmbedding(dir.file("bad.tsv"), a, Eigen::MatrixXd::Zero(3, 2)));

  WriteText(dir.file("broken.tsv"), "utterance_id\tseverity\ttext_id\tpartition\th0\nx\t1\t1\n");
  CHECK_THROWS_AS(ReadLatentTable(dir.file("broken.tsv")), ParseError);

  sources[0].audio = nullptr;
  CHECK_THROWS(ExportLatents(model, sources));
}

namespace {

TrainingCurves CurvesFromCe(const std::vector<double> &ce) {
  TrainingCurves c;
  for (std::size_t i = 0; i < ce.size(); ++i) {
    EpochRecord r;
    r.epoch = static_cast<int>(i) + 1;
    r.train_ce = ce[i] + 1;
    r.valid_ce = ce[i];
    r.valid_ctc = 0.5 * ce[i];
    r.valid_loss = ce[i] + 0.05 * ce[i];
    c.epochs.push_back(r);
  }
  return c;
}

}  // namespace

TEST_CASE("run comparison") {
  TrainingCurves a = CurvesFromCe({3, 2, 4}), b = CurvesFromCe({3, 2.5, 2.4});
  CurveComparison same = CompareRuns(a, a);
  CHECK(same.argmin_valid_ce_a == same.argmin_valid_ce_b);
  for (const auto &row : same.rows) CHECK(row.b.valid_ce - row.a.valid_ce == 0.0);

  CurveComparison cmp = CompareRuns(a, b);
  CHECK(cmp.argmin_valid_ce_a == 2);
  CHECK(cmp.argmin_valid_ce_b == 3);
  nlohmann::json s = ComparisonSummary(cmp);
  CHECK(s["argmin_valid_ce_b"] == 3);
  CHECK(s["min_valid_ce_b"].get<double>() == 2.4);

  TempDir dir;
  WriteComparison(dir.file("cmp.tsv"), cmp);
  std::string text = ReadText(dir.file("cmp.tsv"));
  CHECK(text.find("a_valid_ce") != std::string::npos);
  CHECK(text.find("b_valid_ctc") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  CHECK(CompareRuns(CurvesFromCe({1, 1}), CurvesFromCe({1, 1})).argmin_valid_ce_a == 1);
  CHECK_THROWS_AS(CompareRuns(a, CurvesFromCe({1, 2})), ValidationError);
}
