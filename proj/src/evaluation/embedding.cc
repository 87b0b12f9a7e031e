// src/evaluation/embedding.cc

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
#include <map>
#include <numeric>

#include "dmtl/common/error.h"
#include "dmtl/common/rng.h"
#include "dmtl/evaluation/analysis.h"

namespace dmtl {

namespace {

Eigen::MatrixXd SquaredDistances(const Eigen::MatrixXd &x) {
  Eigen::VectorXd n = x.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * x * x.transpose();
  d.colwise() += n;
  d.rowwise() += n.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

// Row-conditional affinities with per-row precision tuned to the perplexity.
Eigen::MatrixXd ConditionalAffinities(const Eigen::MatrixXd &d2, double perplexity) {
  const Eigen::Index n = d2.rows();
  const double target = std::log(perplexity);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d2(i, j));
    Eigen::VectorXd row(n);
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0.0, weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-(d2(i, j) - dmin) * beta);
        sum += row[j];
        weighted += row[j] * (d2(i, j) - dmin);
      }
      double entropy = std::log(sum) + beta * weighted / sum;
      row /= sum;
      double diff = entropy - target;
      if (std::fabs(diff) < 1e-5) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    p.row(i) = row.transpose();
  }
  return p;
}

Eigen::MatrixXd Tsne(const Eigen::MatrixXd &x, const EmbeddingConfig &c) {
  const Eigen::Index n = x.rows();
  const double perplexity = std::max(1.0, std::min(c.perplexity, (n - 1) / 3.0));
  Eigen::MatrixXd p = ConditionalAffinities(SquaredDistances(x), perplexity);
  p = (p + p.transpose()) / (2.0 * n);
  p = p.cwiseMax(1e-12);
  p.diagonal().setZero();

  Rng rng(DeriveSeed(c.seed, "tsne.init"));
  Eigen::MatrixXd y(n, 2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 1e-4 * Gaussian(rng);
  Eigen::MatrixXd update = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
  const double lr = std::max(static_cast<double>(n) / c.exaggeration / 4.0, 50.0);
  Eigen::MatrixXd num(n, n), grad(n, 2);

  for (int it = 0; it < c.iterations; ++it) {
    const bool early = it < c.exaggeration_iterations;
    const double exag = early ? c.exaggeration : 1.0;
    const double momentum = early ? 0.5 : 0.8;
    Eigen::MatrixXd d2 = SquaredDistances(y);
    num = (1.0 + d2.array()).inverse().matrix();
    num.diagonal().setZero();
    const double z = num.sum();
    Eigen::MatrixXd w = ((exag * p).array() - num.array() / z) * num.array();
    Eigen::VectorXd rs = w.rowwise().sum();
    grad = 4.0 * (rs.asDiagonal() * y - w * y);
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
      double &g = gains.data()[i];
      const bool same = (grad.data()[i] > 0) == (update.data()[i] > 0);
      g = std::max(same ? g * 0.8 : g + 0.2, 0.01);
    }
    update = momentum * update - lr * gains.cwiseProduct(grad);
    y += update;
    y.rowwise() -= y.colwise().mean();
  }
  return y;
}

}  // namespace

Eigen::MatrixXd Embed2d(const Eigen::MatrixXd &x, const EmbeddingConfig &config) {
  if (x.rows() < 3) throw ValidationError("embedding needs at least 3 rows");
  if (!x.allFinite()) throw ValidationError("embedding input contains NaN or Inf");
  // Collapse exact duplicates so identical inputs land on identical points.
  std::vector<Eigen::Index> order(x.rows());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    return a < b;
  };
  std::sort(order.begin(), order.end(), row_less);
  std::vector<Eigen::Index> owner(x.rows());
  std::vector<Eigen::Index> unique;
  for (std::size_t k = 0; k < order.size(); ++k) {
    Eigen::Index i = order[k];
    if (k > 0 && x.row(i) == x.row(order[k - 1])) {
      owner[i] = owner[order[k - 1]];
    } else {
      owner[i] = static_cast<Eigen::Index>(unique.size());
      unique.push_back(i);
    }
  }
  // Keep the first-occurrence order so the result does not depend on sorting.
  std::vector<Eigen::Index> first(unique.size());
  for (std::size_t u = 0; u < unique.size(); ++u) first[u] = unique[u];
  std::vector<Eigen::Index> rank(unique.size());
  std::iota(rank.begin(), rank.end(), Eigen::Index{0});
  std::sort(rank.begin(), rank.end(), [&](Eigen::Index a, Eigen::Index b) {
    return first[a] < first[b];
  });
  std::vector<Eigen::Index> position(unique.size());
  for (std::size_t r = 0; r < rank.size(); ++r) position[rank[r]] = static_cast<Eigen::Index>(r);

  const auto m = static_cast<Eigen::Index>(unique.size());
  Eigen::MatrixXd compact(m, x.cols());
  for (Eigen::Index u = 0; u < m; ++u) compact.row(position[u]) = x.row(first[u]);

  Eigen::MatrixXd coords;
  if (m == 1) {
    coords = Eigen::MatrixXd::Zero(1, 2);
  } else if (m == 2) {
    coords.resize(2, 2);
    coords << -0.5, 0.0, 0.5, 0.0;
  } else {
    coords = Tsne(compact, config);
  }
  Eigen::MatrixXd out(x.rows(), 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = coords.row(position[owner[i]]);
  return out;
}

double NeighbourOverlap(const Eigen::MatrixXd &input, const Eigen::MatrixXd &embedded, int k) {
  const Eigen::Index n = input.rows();
  if (embedded.rows() != n) throw DimensionError("embedding has a different number of rows");
  if (k < 1 || k >= n) throw ValidationError("neighbour count must lie in [1, n - 1]");
  Eigen::MatrixXd da = SquaredDistances(input), db = SquaredDistances(embedded);
  auto knn = [&](const Eigen::MatrixXd &d, Eigen::Index i) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) idx.push_back(j);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
      return d(i, a) != d(i, b) ? d(i, a) < d(i, b) : a < b;
    });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> a = knn(da, i), b = knn(db, i), both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    total += static_cast<double>(both.size()) / k;
  }
  return total / n;
}

}  // namespace dmtl
