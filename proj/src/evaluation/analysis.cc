// src/evaluation/analysis.cc

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

#include <cmath>
#include <fstream>
#include <limits>

#include "dmtl/common/strings.h"
#include "dmtl/evaluation/analysis.h"

namespace dmtl {

Eigen::MatrixXd LatentTable::Matrix() const {
  Eigen::MatrixXd m(rows.size(), dim());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(i) = rows[i].pooled.transpose();
  return m;
}

void LatentTable::Validate() const {
  for (const LatentRow &r : rows) {
    if (r.pooled.size() != dim())
      throw DimensionError("latent row " + r.utterance_id + " has length " +
                           std::to_string(r.pooled.size()) + ", expected " +
                           std::to_string(dim()));
    if (!r.pooled.allFinite()) throw ValidationError("latent row " + r.utterance_id + " is not finite");
  }
}

LatentTable ExportLatents(const MtlModel &model, std::span<const LatentSource> sources) {
  LatentTable table;
  for (const LatentSource &s : sources) {
    if (!s.audio) throw ValidationError("utterance " + s.utterance_id + " has no audio");
    table.rows.push_back(
        {s.utterance_id, s.severity, s.text_id, s.partition, MeanPool(model.Encode(*s.audio))});
  }
  table.Validate();
  return table;
}

void WriteLatentTable(const std::string &path, const LatentTable &table) {
  table.Validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "utterance_id\tseverity\ttext_id\tpartition";
  for (Eigen::Index j = 0; j < table.dim(); ++j) out << "\th" << j;
  out << "\n";
  for (const LatentRow &r : table.rows) {
    out << r.utterance_id << "\t" << r.severity << "\t" << r.text_id << "\t" << r.partition;
    for (Eigen::Index j = 0; j < r.pooled.size(); ++j) out << "\t" << FormatDouble(r.pooled[j]);
    out << "\n";
  }
  if (!out) throw IoError("error writing " + path);
}

LatentTable ReadLatentTable(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  LatentTable table;
  std::string line;
  std::size_t lineno = 0, columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> f = SplitOn(line, '\t');
    if (lineno == 1) {
      if (f.size() < 5 || f[0] != "utterance_id" || f[1] != "severity" || f[2] != "text_id" ||
          f[3] != "partition")
        throw ParseError(path, lineno, "unexpected latent table header");
      columns = f.size();
      continue;
    }
    if (line.empty()) continue;
    if (f.size() != columns)
      throw ParseError(path, lineno, "expected " + std::to_string(columns) + " columns");
    LatentRow r;
    r.utterance_id = f[0];
    long long v;
    if (!ParseInt(f[1], &v)) throw ParseError(path, lineno, "bad severity");
    r.severity = static_cast<int>(v);
    if (!ParseInt(f[2], &v)) throw ParseError(path, lineno, "bad text_id");
    r.text_id = static_cast<int>(v);
    r.partition = f[3];
    r.pooled.resize(columns - 4);
    for (std::size_t j = 4; j < columns; ++j)
      if (!ParseDouble(f[j], &r.pooled[j - 4]))
        throw ParseError(path, lineno, "bad value in column " + std::to_string(j + 1));
    table.rows.push_back(std::move(r));
  }
  table.Validate();
  return table;
}

void WriteEmbedding(const std::string &path, const LatentTable &table,
                    const Eigen::MatrixXd &coords) {
  if (coords.rows() != static_cast<Eigen::Index>(table.rows.size()) || coords.cols() != 2)
    throw DimensionError("embedding does not match the latent table");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "utterance_id\tseverity\ttext_id\tpartition\tx\ty\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const LatentRow &r = table.rows[i];
    out << r.utterance_id << "\t" << r.severity << "\t" << r.text_id << "\t" << r.partition
        << "\t" << FormatDouble(coords(i, 0)) << "\t" << FormatDouble(coords(i, 1)) << "\n";
  }
  if (!out) throw IoError("error writing " + path);
}

SilhouetteReport Silhouette(const Eigen::MatrixXd &x, std::span<const int> labels,
                            const std::string &labelling) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw DimensionError("silhouette: label count differs from row count");
  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < n; ++i) members[labels[i]].push_back(i);
  if (members.size() < 2) throw ValidationError("silhouette needs at least two distinct labels");

  SilhouetteReport report;
  report.labelling = labelling;
  report.per_point.assign(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &own = members[labels[i]];
    if (own.size() < 2) continue;
    double a = 0.0, b = std::numeric_limits<double>::infinity();
    for (const auto &[label, idx] : members) {
      double sum = 0.0;
      for (Eigen::Index j : idx)
        if (j != i) sum += (x.row(i) - x.row(j)).norm();
      if (label == labels[i]) a = sum / (idx.size() - 1);
      else b = std::min(b, sum / idx.size());
    }
    const double denom = std::max(a, b);
    report.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (const auto &[label, idx] : members) {
    double sum = 0.0;
    for (Eigen::Index i : idx) sum += report.per_point[i];
    report.per_cluster[label] = sum / idx.size();
    total += sum;
  }
  report.mean = total / n;
  return report;
}

nlohmann::json ToJson(const SilhouetteReport &report) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto &[label, value] : report.per_cluster) per[std::to_string(label)] = value;
  return {{"labelling", report.labelling}, {"mean", report.mean}, {"per_cluster", per}};
}

namespace {

int ArgminValidCe(const TrainingCurves &c) {
  int best = 0;
  for (std::size_t i = 0; i < c.epochs.size(); ++i)
    if (best == 0 || c.epochs[i].valid_ce < c.epochs[best - 1].valid_ce)
      best = static_cast<int>(i) + 1;
  return best;
}

}  // namespace

CurveComparison CompareRuns(const TrainingCurves &a, const TrainingCurves &b) {
  if (a.epochs.size() != b.epochs.size())
    throw ValidationError("runs differ in length (" + std::to_string(a.epochs.size()) + " vs " +
                          std::to_string(b.epochs.size()) + " epochs)");
  if (a.epochs.empty()) throw ValidationError("runs have no epochs to compare");
  CurveComparison c;
  for (std::size_t i = 0; i < a.epochs.size(); ++i)
    c.rows.push_back({static_cast<int>(i) + 1, a.epochs[i], b.epochs[i]});
  c.argmin_valid_ce_a = ArgminValidCe(a);
  c.argmin_valid_ce_b = ArgminValidCe(b);
  return c;
}

void WriteComparison(const std::string &path, const CurveComparison &c) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch\ta_train_ce\tb_train_ce\ta_valid_ce\tb_valid_ce\tdelta_valid_ce"
         "\ta_train_ctc\tb_train_ctc\ta_valid_ctc\tb_valid_ctc\tdelta_valid_ctc\n";
  for (const CurveComparisonRow &r : c.rows) {
    out << r.epoch;
    for (double v : {r.a.train_ce, r.b.train_ce, r.a.valid_ce, r.b.valid_ce,
                     r.b.valid_ce - r.a.valid_ce, r.a.train_ctc, r.b.train_ctc, r.a.valid_ctc,
                     r.b.valid_ctc, r.b.valid_ctc - r.a.valid_ctc})
      out << "\t" << FormatDouble(v);
    out << "\n";
  }
  if (!out) throw IoError("error writing " + path);
}

nlohmann::json ComparisonSummary(const CurveComparison &c) {
  return {{"epochs", c.rows.size()},
          {"argmin_valid_ce_a", c.argmin_valid_ce_a},
          {"argmin_valid_ce_b", c.argmin_valid_ce_b},
          {"min_valid_ce_a", c.rows[c.argmin_valid_ce_a - 1].a.valid_ce},
          {"min_valid_ce_b", c.rows[c.argmin_valid_ce_b - 1].b.valid_ce}};
}

}  // namespace dmtl
