// include/dmtl/evaluation/metrics.h

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

#ifndef DMTL_EVALUATION_METRICS_H_
#define DMTL_EVALUATION_METRICS_H_

#include <array>
#include <span>
#include <string>

#include <json.hpp>

#include "dmtl/corpus/types.h"

namespace dmtl {

// Rows are true labels, columns predictions.
struct ConfusionMatrix {
  std::array<std::array<long long, kNumSeverityClasses>, kNumSeverityClasses> counts{};

  long long total() const;
  long long row_sum(int k) const;
  long long col_sum(int k) const;
};

ConfusionMatrix Confusion(std::span<const int> y_true, std::span<const int> y_pred);

struct ClassMetrics {
  double precision = 0, recall = 0, f1 = 0;  // fractions
  long long support = 0;                     // true count
};

// Fractions in [0, 1]. Classes absent from the truth are left out of the
// macro averages; a class never predicted has precision 0.
struct MetricsReport {
  double accuracy = 0, macro_precision = 0, macro_recall = 0, macro_f1 = 0;
  std::array<ClassMetrics, kNumSeverityClasses> per_class{};
  ConfusionMatrix confusion;
};

MetricsReport MacroMetrics(const ConfusionMatrix &cm);
MetricsReport ComputeMetrics(std::span<const int> y_true, std::span<const int> y_pred);

// Percentage with two decimals, e.g. 0.60553 -> "60.55".
std::string FormatPercent(double fraction);

// Percentages rounded to two decimals, plus counts.
nlohmann::json ToJson(const MetricsReport &report);
// Headline metrics, per-class rows and the confusion matrix as text.
std::string RenderMetricsTable(const MetricsReport &report);

}  // namespace dmtl

#endif  // DMTL_EVALUATION_METRICS_H_
