// include/dmtl/evaluation/analysis.h

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

#ifndef DMTL_EVALUATION_ANALYSIS_H_
#define DMTL_EVALUATION_ANALYSIS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dmtl/corpus/types.h"
#include "dmtl/model/mtl_model.h"
#include "dmtl/trainer/trainer.h"

namespace dmtl {

struct LatentRow {
  std::string utterance_id;
  int severity = 0;
  int text_id = 1;
  std::string partition;
  Eigen::VectorXd pooled;  // mean-pooled latent vector
};

struct LatentTable {
  std::vector<LatentRow> rows;

  Eigen::Index dim() const { return rows.empty() ? 0 : rows.front().pooled.size(); }
  Eigen::MatrixXd Matrix() const;  // one row per utterance
  void Validate() const;
};

struct LatentSource {
  std::string utterance_id;
  int severity = 0;
  int text_id = 1;
  std::string partition;
  const RawAudio *audio = nullptr;
};

LatentTable ExportLatents(const MtlModel &model, std::span<const LatentSource> sources);

// Tab-separated: utterance_id, severity, text_id, partition, h0..h{F-1}.
void WriteLatentTable(const std::string &path, const LatentTable &table);
LatentTable ReadLatentTable(const std::string &path);

struct EmbeddingConfig {
  double perplexity = 30.0;  // capped at (n - 1) / 3
  int iterations = 1000;
  int exaggeration_iterations = 250;
  double exaggeration = 12.0;
  std::uint64_t seed = 0;
};

// Exact t-SNE to two dimensions. Identical input rows share coordinates.
Eigen::MatrixXd Embed2d(const Eigen::MatrixXd &x, const EmbeddingConfig &config = {});

// Mean fraction of each point's k nearest neighbours (Euclidean, excluding
// itself) shared between the input space and the embedding.
double NeighbourOverlap(const Eigen::MatrixXd &input, const Eigen::MatrixXd &embedded, int k);

void WriteEmbedding(const std::string &path, const LatentTable &table,
                    const Eigen::MatrixXd &coords);

struct SilhouetteReport {
  std::string labelling;  // "severity" or "text_id"
  double mean = 0.0;
  std::map<int, double> per_cluster;
  std::vector<double> per_point;
};

// Euclidean silhouette. Points in singleton clusters, and points whose
// intra- and nearest-cluster distances are both zero, score 0.
SilhouetteReport Silhouette(const Eigen::MatrixXd &x, std::span<const int> labels,
                            const std::string &labelling = "");

nlohmann::json ToJson(const SilhouetteReport &report);

struct CurveComparisonRow {
  int epoch = 0;
  EpochRecord a, b;
};

struct CurveComparison {
  std::vector<CurveComparisonRow> rows;
  int argmin_valid_ce_a = 0;  // 1-indexed, earliest on ties
  int argmin_valid_ce_b = 0;
};

CurveComparison CompareRuns(const TrainingCurves &a, const TrainingCurves &b);

// Tab-separated per-epoch table: both runs' CE and CTC losses (train and
// valid) and the b - a deltas.
void WriteComparison(const std::string &path, const CurveComparison &comparison);
nlohmann::json ComparisonSummary(const CurveComparison &comparison);

}  // namespace dmtl

#endif  // DMTL_EVALUATION_ANALYSIS_H_
