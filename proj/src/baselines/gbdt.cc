// src/baselines/gbdt.cc

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
#include <limits>
#include <numeric>

#include "dmtl/baselines/baselines.h"

namespace dmtl {

void GbdtParams::Validate() const {
  if (max_depth < 3 || max_depth > 5)
    throw ValidationError("GBDT max depth must lie in [3, 5], got " + std::to_string(max_depth));
  if (rounds < 1) throw ValidationError("GBDT needs at least one round");
  if (!(learning_rate > 0)) throw ValidationError("GBDT learning rate must be positive");
  if (lambda < 0 || min_child_weight < 0 || patience < 1)
    throw ValidationError("invalid GBDT regularisation settings");
}

double RegressionTree::Predict(const Eigen::VectorXd &x) const {
  int n = 0;
  while (nodes[n].feature >= 0)
    n = x[nodes[n].feature] < nodes[n].threshold ? nodes[n].left : nodes[n].right;
  return nodes[n].value;
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd &x;
  std::span<const double> g, h;
  const GbdtParams &p;
  std::vector<std::vector<Eigen::Index>> sorted;  // per feature, all rows by value
  RegressionTree tree;

  double Score(double G, double H) const { return G * G / (H + p.lambda); }

  int Build(const std::vector<char> &member, int depth) {
    double G = 0, H = 0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (member[i]) {
        G += g[i];
        H += h[i];
        ++count;
      }
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].value = -p.learning_rate * G / (H + p.lambda);
    if (depth >= p.max_depth || count < 2) return id;

    double best_gain = 0.0, best_threshold = 0.0;
    int best_feature = -1;
    const double parent = Score(G, H);
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      double GL = 0, HL = 0;
      Eigen::Index prev = -1;
      for (Eigen::Index i : sorted[f]) {
        if (!member[i]) continue;
        if (prev >= 0 && x(i, f) > x(prev, f) && HL >= p.min_child_weight &&
            H - HL >= p.min_child_weight) {
          double gain = 0.5 * (Score(GL, HL) + Score(G - GL, H - HL) - parent);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_threshold = 0.5 * (x(prev, f) + x(i, f));
          }
        }
        GL += g[i];
        HL += h[i];
        prev = i;
      }
    }
    if (best_feature < 0) return id;

    std::vector<char> left(member.size(), 0), right(member.size(), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (member[i]) (x(i, best_feature) < best_threshold ? left : right)[i] = 1;
    tree.nodes[id].feature = best_feature;
    tree.nodes[id].threshold = best_threshold;
    tree.nodes[id].gain = best_gain;
    int l = Build(left, depth + 1);
    int r = Build(right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

std::vector<std::vector<Eigen::Index>> SortedColumns(const Eigen::MatrixXd &x) {
  std::vector<std::vector<Eigen::Index>> sorted(x.cols());
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto &idx = sorted[f];
    idx.resize(x.rows());
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return x(a, f) < x(b, f); });
  }
  return sorted;
}

RegressionTree FitSorted(const Eigen::MatrixXd &x, std::span<const double> grad,
                         std::span<const double> hess, const GbdtParams &params,
                         const std::vector<std::vector<Eigen::Index>> &sorted) {
  TreeBuilder b{x, grad, hess, params, sorted, {}};
  b.Build(std::vector<char>(x.rows(), 1), 0);
  return std::move(b.tree);
}

double MeanSoftmaxLoss(const Eigen::MatrixXd &scores, const std::vector<int> &y) {
  double loss = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double mx = scores.row(i).maxCoeff();
    loss += std::log((scores.row(i).array() - mx).exp().sum()) + mx - scores(i, y[i]);
  }
  return loss / static_cast<double>(scores.rows());
}

}  // namespace

RegressionTree FitTree(const Eigen::MatrixXd &x, std::span<const double> grad,
                       std::span<const double> hess, const GbdtParams &params) {
  if (static_cast<Eigen::Index>(grad.size()) != x.rows() ||
      static_cast<Eigen::Index>(hess.size()) != x.rows())
    throw DimensionError("tree gradients do not match the sample count");
  return FitSorted(x, grad, hess, params, SortedColumns(x));
}

GbdtModel TrainGbdt(const LabelledData &train, const LabelledData *valid,
                    const GbdtParams &params) {
  params.Validate();
  train.Validate();
  if (train.size() == 0) throw ValidationError("GBDT training set is empty");
  if (valid) {
    valid->Validate();
    if (valid->size() == 0) valid = nullptr;
    else if (valid->dim() != train.dim()) throw DimensionError("GBDT train/valid dims differ");
  }
  const int K = kNumSeverityClasses;
  const Eigen::Index n = train.size();
  GbdtModel m;
  m.params = params;
  m.num_classes = K;
  m.num_features = static_cast<int>(train.dim());
  const auto sorted = SortedColumns(train.x);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, K);
  Eigen::MatrixXd vscores = Eigen::MatrixXd::Zero(valid ? valid->size() : 0, K);
  std::vector<double> grad(n), hess(n);
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;

  for (int round = 0; round < params.rounds; ++round) {
    Eigen::MatrixXd prob(n, K);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::RowVectorXd e = (scores.row(i).array() - scores.row(i).maxCoeff()).exp();
      prob.row(i) = e / e.sum();
    }
    std::vector<RegressionTree> trees;
    for (int k = 0; k < K; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double p = prob(i, k);
        grad[i] = p - (train.y[i] == k ? 1.0 : 0.0);
        hess[i] = std::max(2.0 * p * (1.0 - p), 1e-16);
      }
      trees.push_back(FitSorted(train.x, grad, hess, params, sorted));
    }
    for (int k = 0; k < K; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) scores(i, k) += trees[k].Predict(train.x.row(i));
      for (Eigen::Index i = 0; i < vscores.rows(); ++i)
        vscores(i, k) += trees[k].Predict(valid->x.row(i));
    }
    m.rounds.push_back(std::move(trees));
    m.train_loss.push_back(MeanSoftmaxLoss(scores, train.y));
    double monitored = m.train_loss.back();
    if (valid) {
      m.valid_loss.push_back(MeanSoftmaxLoss(vscores, valid->y));
      monitored = m.valid_loss.back();
    }
    if (monitored < best) {
      best = monitored;
      m.best_rounds = round + 1;
      stale = 0;
    } else if (++stale >= params.patience) {
      break;
    }
  }
  m.rounds.resize(m.best_rounds);
  return m;
}

Eigen::VectorXd GbdtScores(const GbdtModel &model, const Eigen::VectorXd &x) {
  if (x.size() != model.num_features)
    throw DimensionError("GBDT expects " + std::to_string(model.num_features) +
                         " features, got " + std::to_string(x.size()));
  Eigen::VectorXd s = Eigen::VectorXd::Zero(model.num_classes);
  for (const auto &round : model.rounds)
    for (int k = 0; k < model.num_classes; ++k) s[k] += round[k].Predict(x);
  return s;
}

}  // namespace dmtl
