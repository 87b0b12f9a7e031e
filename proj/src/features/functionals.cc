// src/features/functionals.cc

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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dmtl/common/error.h"
#include "dmtl/common/strings.h"
#include "dmtl/features/features.h"

namespace dmtl {

const char *FeatureSetName(FeatureSetId id) {
  switch (id) {
    case FeatureSetId::kAcoustic: return "acoustic";
    case FeatureSetId::kLinguistic: return "linguistic";
    case FeatureSetId::kCombined: return "combined";
  }
  return "?";
}

FeatureSetId ParseFeatureSet(const std::string &name) {
  if (name == "acoustic" || name == "egemaps") return FeatureSetId::kAcoustic;
  if (name == "linguistic") return FeatureSetId::kLinguistic;
  if (name == "combined") return FeatureSetId::kCombined;
  throw Error("unknown feature set '" + name + "'");
}

void FeatureVector::Validate() const {
  if (values.size() != names.size())
    throw DimensionError("feature vector has " + std::to_string(values.size()) +
                         " values but " + std::to_string(names.size()) + " names");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw Error("feature '" + names[i] + "' is not finite");
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("percentile of an empty set");
  std::sort(values.begin(), values.end());
  double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

FeatureVector ApplyFunctionals(const LldMatrix &lld) {
  if (lld.frames() < 1) throw Error("functionals need at least one frame");
  const auto dims = lld.values.cols();
  if (static_cast<Eigen::Index>(lld.descriptor_names.size()) != dims ||
      static_cast<Eigen::Index>(lld.scopes.size()) != dims ||
      static_cast<Eigen::Index>(lld.voiced_mask.size()) != lld.frames())
    throw DimensionError("LLD matrix metadata does not match its shape");

  FeatureVector out;
  out.set_id = FeatureSetId::kAcoustic;
  static const char *kFunctionals[] = {"mean", "std", "p20", "p50", "p80"};
  for (Eigen::Index d = 0; d < dims; ++d) {
    std::vector<double> column;
    for (Eigen::Index t = 0; t < lld.frames(); ++t) {
      bool take = true;
      switch (lld.scopes[d]) {
        case FrameScope::kAll: break;
        case FrameScope::kVoiced: take = lld.voiced_mask[t]; break;
        case FrameScope::kVoicedPairs:
          take = t > 0 && lld.voiced_mask[t] && lld.voiced_mask[t - 1];
          break;
      }
      if (take) column.push_back(lld.values(t, d));
    }
    double stats[5] = {0, 0, 0, 0, 0};
    if (!column.empty()) {
      double mean = 0.0;
      for (double v : column) mean += v;
      mean /= static_cast<double>(column.size());
      double var = 0.0;
      for (double v : column) var += (v - mean) * (v - mean);
      var /= static_cast<double>(column.size());
      stats[0] = mean;
      stats[1] = std::sqrt(var);
      stats[2] = Percentile(column, 20.0);
      stats[3] = Percentile(column, 50.0);
      stats[4] = Percentile(column, 80.0);
    }
    for (int f = 0; f < 5; ++f) {
      out.names.push_back(lld.descriptor_names[d] + "_" + kFunctionals[f]);
      out.values.push_back(stats[f]);
    }
    if (lld.scopes[d] != FrameScope::kAll) {
      out.names.push_back(lld.descriptor_names[d] + "_valid");
      out.values.push_back(column.empty() ? 0.0 : 1.0);
    }
  }
  out.Validate();
  return out;
}

FeatureVector CombineFeatures(const FeatureVector &a, const FeatureVector &b) {
  if (b.values.empty()) return a;
  if (a.values.empty()) return b;
  std::set<std::string> names(a.names.begin(), a.names.end());
  FeatureVector out = a;
  out.set_id = FeatureSetId::kCombined;
  for (std::size_t i = 0; i < b.names.size(); ++i) {
    if (!names.insert(b.names[i]).second)
      throw Error("duplicate feature name '" + b.names[i] + "'");
    out.names.push_back(b.names[i]);
    out.values.push_back(b.values[i]);
  }
  return out;
}

FeatureVector ExtractFeatureSet(FeatureSetId set, const RawAudio &audio,
                                const std::vector<int> &transcript) {
  switch (set) {
    case FeatureSetId::kAcoustic:
      return ApplyFunctionals(ExtractLlds(audio));
    case FeatureSetId::kLinguistic:
      return ExtractLinguistic(audio, transcript);
    case FeatureSetId::kCombined:
      return CombineFeatures(ApplyFunctionals(ExtractLlds(audio)),
                             ExtractLinguistic(audio, transcript));
  }
  throw Error("unknown feature set");
}

void WriteFeatureTable(const std::string &path, const FeatureTable &table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "utterance_id\tset_id";
  if (!table.rows.empty())
    for (const auto &n : table.rows.front().names) out << '\t' << n;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    if (row.names != table.rows.front().names)
      throw DimensionError("feature rows disagree on names");
    out << table.utterance_ids[r] << '\t' << FeatureSetName(row.set_id);
    for (double v : row.values) out << '\t' << FormatDouble(v);
    out << '\n';
  }
}

FeatureTable ReadFeatureTable(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> names;
  FeatureTable table;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitOn(line, '\t');
    if (lineno == 1) {
      if (fields.size() < 2 || fields[0] != "utterance_id" || fields[1] != "set_id")
        throw ParseError(path, lineno, "missing feature table header");
      names.assign(fields.begin() + 2, fields.end());
      continue;
    }
    if (fields.size() != names.size() + 2)
      throw ParseError(path, lineno, "wrong number of fields");
    FeatureVector v;
    try {
      v.set_id = ParseFeatureSet(fields[1]);
    } catch (const Error &e) {
      throw ParseError(path, lineno, e.what());
    }
    v.names = names;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      double x;
      if (!ParseDouble(fields[i], &x))
        throw ParseError(path, lineno, "invalid value '" + fields[i] + "'");
      v.values.push_back(x);
    }
    table.utterance_ids.push_back(fields[0]);
    table.rows.push_back(std::move(v));
  }
  return table;
}

}  // namespace dmtl
