// src/trainer/curves.cc

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
#include "dmtl/trainer/trainer.h"

namespace dmtl {

namespace {

const char *const kColumns[] = {"epoch",    "train_ce", "train_ctc",
                                "train_loss", "valid_ce", "valid_ctc",
                                "valid_loss", "wall_seconds", "skipped"};
constexpr int kNumColumns = 9;

}  // namespace

std::vector<double> TrainingCurves::valid_loss() const {
  std::vector<double> out;
  for (const EpochRecord &r : epochs) out.push_back(r.valid_loss);
  return out;
}

std::vector<double> TrainingCurves::valid_ce() const {
  std::vector<double> out;
  for (const EpochRecord &r : epochs) out.push_back(r.valid_ce);
  return out;
}

void TrainingCurves::Validate() const {
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const EpochRecord &r = epochs[i];
    if (r.epoch != static_cast<int>(i) + 1)
      throw ValidationError("curves: epoch " + std::to_string(i + 1) + " missing");
    for (double v : {r.train_ce, r.train_ctc, r.train_loss, r.valid_ce, r.valid_ctc,
                     r.valid_loss, r.wall_seconds})
      if (!std::isfinite(v))
        throw ValidationError("curves: non-finite value at epoch " + std::to_string(r.epoch));
  }
}

void WriteCurves(const std::string &path, const TrainingCurves &curves) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (int c = 0; c < kNumColumns; ++c) out << (c ? "\t" : "") << kColumns[c];
  out << "\n";
  for (const EpochRecord &r : curves.epochs) {
    out << r.epoch;
    for (double v : {r.train_ce, r.train_ctc, r.train_loss, r.valid_ce, r.valid_ctc,
                     r.valid_loss, r.wall_seconds})
      out << "\t" << FormatDouble(v);
    out << "\t" << r.skipped << "\n";
  }
  if (!out) throw IoError("error writing " + path);
}

TrainingCurves ReadCurves(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  TrainingCurves curves;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> f = SplitOn(line, '\t');
    if (lineno == 1) {
      bool ok = f.size() == kNumColumns;
      for (int c = 0; ok && c < kNumColumns; ++c) ok = f[c] == kColumns[c];
      if (!ok) throw ParseError(path, lineno, "unexpected curves header");
      continue;
    }
    if (line.empty()) continue;
    if (f.size() != kNumColumns) throw ParseError(path, lineno, "expected 9 columns");
    EpochRecord r;
    long long ll;
    if (!ParseInt(f[0], &ll)) throw ParseError(path, lineno, "bad epoch");
    r.epoch = static_cast<int>(ll);
    double *fields[] = {&r.train_ce, &r.train_ctc, &r.train_loss, &r.valid_ce,
                        &r.valid_ctc, &r.valid_loss, &r.wall_seconds};
    for (int c = 0; c < 7; ++c)
      if (!ParseDouble(f[c + 1], fields[c]))
        throw ParseError(path, lineno, "bad number in column " + std::string(kColumns[c + 1]));
    if (!ParseInt(f[8], &ll)) throw ParseError(path, lineno, "bad skipped count");
    r.skipped = static_cast<int>(ll);
    curves.epochs.push_back(r);
  }
  return curves;
}

nlohmann::json CurvesToJson(const TrainingCurves &curves) {
  nlohmann::json rows = nlohmann::json::array();
  for (const EpochRecord &r : curves.epochs)
    rows.push_back({r.epoch, r.train_ce, r.train_ctc, r.train_loss, r.valid_ce,
                    r.valid_ctc, r.valid_loss, r.wall_seconds, r.skipped});
  return rows;
}

TrainingCurves CurvesFromJson(const nlohmann::json &j) {
  TrainingCurves curves;
  for (const auto &row : j) {
    if (row.size() != kNumColumns) throw ValidationError("curves: malformed row");
    EpochRecord r;
    r.epoch = row[0].get<int>();
    r.train_ce = row[1].get<double>();
    r.train_ctc = row[2].get<double>();
    r.train_loss = row[3].get<double>();
    r.valid_ce = row[4].get<double>();
    r.valid_ctc = row[5].get<double>();
    r.valid_loss = row[6].get<double>();
    r.wall_seconds = row[7].get<double>();
    r.skipped = row[8].get<int>();
    curves.epochs.push_back(r);
  }
  return curves;
}

int SelectBestEpoch(std::span<const double> valid_loss, int warmup_epochs) {
  int best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t i = std::max(warmup_epochs, 0); i < valid_loss.size(); ++i) {
    if (best == 0 || valid_loss[i] < best_loss) {
      best = static_cast<int>(i) + 1;
      best_loss = valid_loss[i];
    }
  }
  if (best == 0)
    throw ValidationError("no epoch after the " + std::to_string(warmup_epochs) +
                          " warmup epochs to select from");
  return best;
}

}  // namespace dmtl
