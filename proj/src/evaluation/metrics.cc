// src/evaluation/metrics.cc

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

#include "dmtl/evaluation/metrics.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dmtl/common/error.h"
#include "dmtl/common/strings.h"

namespace dmtl {

long long ConfusionMatrix::total() const {
  long long n = 0;
  for (const auto &row : counts)
    for (long long c : row) n += c;
  return n;
}

long long ConfusionMatrix::row_sum(int k) const {
  long long n = 0;
  for (long long c : counts[k]) n += c;
  return n;
}

long long ConfusionMatrix::col_sum(int k) const {
  long long n = 0;
  for (const auto &row : counts) n += row[k];
  return n;
}

ConfusionMatrix Confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw ValidationError("label sequences differ in length (" + std::to_string(y_true.size()) +
                          " vs " + std::to_string(y_pred.size()) + ")");
  if (y_true.empty()) throw ValidationError("no labels to score");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    for (int y : {y_true[i], y_pred[i]})
      if (y < 0 || y >= kNumSeverityClasses)
        throw ValidationError("label " + std::to_string(y) + " outside 0.." +
                              std::to_string(kNumSeverityClasses - 1));
    ++cm.counts[y_true[i]][y_pred[i]];
  }
  return cm;
}

MetricsReport MacroMetrics(const ConfusionMatrix &cm) {
  MetricsReport r;
  r.confusion = cm;
  const long long total = cm.total();
  if (total == 0) throw ValidationError("empty confusion matrix");
  long long trace = 0;
  int present = 0;
  for (int k = 0; k < kNumSeverityClasses; ++k) {
    const long long tp = cm.counts[k][k];
    trace += tp;
    ClassMetrics &c = r.per_class[k];
    c.support = cm.row_sum(k);
    const long long predicted = cm.col_sum(k);
    c.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    c.recall = c.support > 0 ? static_cast<double>(tp) / c.support : 0.0;
    c.f1 = c.precision + c.recall > 0
               ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
               : 0.0;
    if (c.support == 0) continue;
    ++present;
    r.macro_precision += c.precision;
    r.macro_recall += c.recall;
    r.macro_f1 += c.f1;
  }
  r.macro_precision /= present;
  r.macro_recall /= present;
  r.macro_f1 /= present;
  r.accuracy = static_cast<double>(trace) / total;
  return r;
}

MetricsReport ComputeMetrics(std::span<const int> y_true, std::span<const int> y_pred) {
  return MacroMetrics(Confusion(y_true, y_pred));
}

std::string FormatPercent(double fraction) { return FormatFixed(100.0 * fraction, 2); }

namespace {

double Percent2(double fraction) { return std::round(10000.0 * fraction) / 100.0; }

}  // namespace

nlohmann::json ToJson(const MetricsReport &r) {
  nlohmann::json j;
  j["accuracy"] = Percent2(r.accuracy);
  j["precision_macro"] = Percent2(r.macro_precision);
  j["recall_macro"] = Percent2(r.macro_recall);
  j["f1_macro"] = Percent2(r.macro_f1);
  nlohmann::json per = nlohmann::json::array();
  for (int k = 0; k < kNumSeverityClasses; ++k) {
    const ClassMetrics &c = r.per_class[k];
    per.push_back({{"severity", k},
                   {"precision", Percent2(c.precision)},
                   {"recall", Percent2(c.recall)},
                   {"f1", Percent2(c.f1)},
                   {"support", c.support}});
  }
  j["per_class"] = per;
  nlohmann::json cm = nlohmann::json::array();
  for (const auto &row : r.confusion.counts) cm.push_back(row);
  j["confusion"] = cm;
  j["total"] = r.confusion.total();
  return j;
}

std::string RenderMetricsTable(const MetricsReport &r) {
  std::ostringstream out;
  out << "Accuracy  Precision  Recall  F1-score\n"
      << FormatPercent(r.accuracy) << "     " << FormatPercent(r.macro_precision) << "      "
      << FormatPercent(r.macro_recall) << "   " << FormatPercent(r.macro_f1) << "\n\n";
  out << "severity  precision  recall  f1      support\n";
  for (int k = 0; k < kNumSeverityClasses; ++k) {
    const ClassMetrics &c = r.per_class[k];
    char line[96];
    std::snprintf(line, sizeof line, "%-9d %-10s %-7s %-7s %lld\n", k,
                  FormatPercent(c.precision).c_str(), FormatPercent(c.recall).c_str(),
                  FormatPercent(c.f1).c_str(), c.support);
    out << line;
  }
  out << "\nconfusion (rows true, columns predicted)\n";
  for (const auto &row : r.confusion.counts) {
    for (int k = 0; k < kNumSeverityClasses; ++k) {
      char cell[24];
      std::snprintf(cell, sizeof cell, "%6lld", row[k]);
      out << cell;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace dmtl
