// src/baselines/grid_search.cc

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

#include <chrono>
#include <cmath>
#include <fstream>

#include "dmtl/baselines/baselines.h"
#include "dmtl/common/strings.h"

namespace dmtl {

GridMetric ParseGridMetric(const std::string &s) {
  if (s == "f1" || s == "macro_f1") return GridMetric::kMacroF1;
  if (s == "accuracy") return GridMetric::kAccuracy;
  throw ValidationError("unknown grid metric '" + s + "' (f1, accuracy)");
}

void GridSpec::Validate() const {
  if (values.empty()) throw ValidationError("empty hyperparameter grid");
  for (const auto &[name, candidates] : values)
    if (candidates.empty())
      throw ValidationError("hyperparameter '" + name + "' has no candidate values");
}

std::vector<nlohmann::json> GridSpec::Configs() const {
  Validate();
  std::vector<nlohmann::json> out = {nlohmann::json::object()};
  for (const auto &[name, candidates] : values) {
    std::vector<nlohmann::json> next;
    for (const nlohmann::json &partial : out)
      for (const nlohmann::json &v : candidates) {
        nlohmann::json c = partial;
        c[name] = v;
        next.push_back(std::move(c));
      }
    out = std::move(next);
  }
  return out;
}

GridSpec DefaultGrid(Family family) {
  GridSpec g;
  g.family = family;
  switch (family) {
    case Family::kSvm: {
      std::vector<nlohmann::json> decades;
      for (int e = -4; e <= 4; ++e) decades.push_back(std::pow(10.0, e));
      g.values["C"] = decades;
      g.values["gamma"] = decades;
      break;
    }
    case Family::kMlp: {
      std::vector<nlohmann::json> layers;
      for (int l = 1; l <= 10; ++l) layers.push_back(l);
      g.values["hidden_layers"] = layers;
      g.values["activation"] = {"identity", "logistic", "relu", "tanh"};
      g.values["optimizer"] = {"adam", "sgd"};
      g.values["lr"] = {1e-4, 1e-3, 1e-2, 1e-1};
      break;
    }
    case Family::kGbdt:
      g.values["max_depth"] = {3, 4, 5};
      break;
  }
  return g;
}

namespace {

int CompareValue(const nlohmann::json &a, const nlohmann::json &b) {
  if (a.is_number() && b.is_number()) {
    double x = a.get<double>(), y = b.get<double>();
    return x < y ? -1 : (y < x ? 1 : 0);
  }
  if (a.is_number() != b.is_number()) return a.is_number() ? -1 : 1;
  std::string x = a.is_string() ? a.get<std::string>() : a.dump();
  std::string y = b.is_string() ? b.get<std::string>() : b.dump();
  return x.compare(y) < 0 ? -1 : (x == y ? 0 : 1);
}

}  // namespace

bool ConfigLess(const nlohmann::json &a, const nlohmann::json &b) {
  auto ia = a.begin(), ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (ia.key() != ib.key()) return ia.key() < ib.key();
    int c = CompareValue(ia.value(), ib.value());
    if (c != 0) return c < 0;
  }
  return ia == a.end() && ib != b.end();
}

GridSearchResult GridSearch(const GridSpec &grid, const LabelledData &train,
                            const LabelledData &valid, GridMetric metric, std::uint64_t seed) {
  if (valid.size() == 0) throw ValidationError("grid search needs a validation set");
  GridSearchResult result;
  int best = -1;
  double best_score = 0.0;
  for (const nlohmann::json &config : grid.Configs()) {
    GridResult row;
    row.config = config;
    const auto start = std::chrono::steady_clock::now();
    ClassifierModel model;
    try {
      model = TrainClassifier(grid.family, config, train, &valid, seed);
      row.valid = ComputeMetrics(valid.y, PredictRows(model, valid.x));
      row.ok = true;
    } catch (const Error &e) {
      row.error = e.what();
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (row.ok) {
      double score = metric == GridMetric::kMacroF1 ? row.valid.macro_f1 : row.valid.accuracy;
      if (best < 0 || score > best_score ||
          (score == best_score && ConfigLess(config, result.best_config))) {
        best = static_cast<int>(result.table.size());
        best_score = score;
        result.best = std::move(model);
        result.best_config = config;
      }
    }
    result.table.push_back(std::move(row));
  }
  if (best < 0) {
    std::string first = result.table.empty() ? "" : result.table.front().error;
    throw ValidationError("every grid configuration failed to train; first error: " + first);
  }
  return result;
}

void WriteGridTable(const std::string &path, Family family, const std::vector<GridResult> &table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "family\tconfig\taccuracy\tprecision\trecall\tf1\tseconds\tstatus\n";
  for (const GridResult &r : table) {
    out << FamilyName(family) << "\t" << r.config.dump() << "\t";
    if (r.ok)
      out << FormatPercent(r.valid.accuracy) << "\t" << FormatPercent(r.valid.macro_precision)
          << "\t" << FormatPercent(r.valid.macro_recall) << "\t"
          << FormatPercent(r.valid.macro_f1) << "\t";
    else
      out << "-\t-\t-\t-\t";
    out << FormatFixed(r.seconds, 3) << "\t" << (r.ok ? "ok" : "failed: " + r.error) << "\n";
  }
  if (!out) throw IoError("error writing " + path);
}

}  // namespace dmtl
