// src/baselines/svm.cc

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
#include <limits>

#include "dmtl/baselines/baselines.h"

namespace dmtl {

Eigen::MatrixXd RbfKernel(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b, double gamma) {
  Eigen::VectorXd na = a.rowwise().squaredNorm(), nb = b.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * a * b.transpose();
  d.colwise() += na;
  d.rowwise() += nb.transpose();
  return (-gamma * d.array().max(0.0)).exp().matrix();
}

BinarySvm SolveBinarySvm(const Eigen::MatrixXd &kernel, std::span<const int> signs,
                         const SvmParams &params) {
  const Eigen::Index n = kernel.rows();
  if (kernel.cols() != n || static_cast<Eigen::Index>(signs.size()) != n)
    throw DimensionError("SVM kernel and labels disagree in size");
  const double C = params.c;
  constexpr double kTau = 1e-12;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = signs[i] > 0 ? 1.0 : -1.0;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);  // Q alpha - e
  auto in_up = [&](Eigen::Index t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (y[t] < 0 && alpha[t] < C) || (y[t] > 0 && alpha[t] > 0);
  };

  BinarySvm out;
  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t)) gmin = std::min(gmin, v);
    }
    out.kkt_gap = gmax - gmin;
    if (i < 0 || gmax - gmin < params.tolerance) {
      out.converged = true;
      break;
    }
    if (out.iterations >= params.max_iterations) break;

    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      double b = gmax + y[t] * grad[t];
      if (b <= 0) continue;
      double a = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
      if (a <= 0) a = kTau;
      double obj = -b * b / a;
      if (obj < best) {
        best = obj;
        j = t;
      }
    }
    if (j < 0) {
      out.converged = true;
      break;
    }
    ++out.iterations;

    const double ai = alpha[i], aj = alpha[j];
    const double qij = y[i] * y[j] * kernel(i, j);
    if (y[i] != y[j]) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      double delta = (-grad[i] - grad[j]) / quad;
      double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      double delta = (grad[i] - grad[j]) / quad;
      double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - ai, dj = alpha[j] - aj;
    for (Eigen::Index t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * kernel(i, t) * di + y[j] * kernel(j, t) * dj);
  }

  // Offset from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0;
  int free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  out.rho = free > 0 ? sum_free / free : 0.5 * (ub + lb);
  out.coef = alpha.cwiseProduct(y);
  return out;
}

SvmModel TrainSvm(const LabelledData &train, const SvmParams &params) {
  train.Validate();
  if (!(params.c > 0) || !(params.gamma > 0))
    throw ValidationError("SVM C and gamma must be positive");
  SvmModel model;
  model.params = params;
  std::vector<bool> seen(kNumSeverityClasses, false);
  for (int label : train.y) seen[label] = true;
  for (int k = 0; k < kNumSeverityClasses; ++k)
    if (seen[k]) model.classes.push_back(k);
  if (model.classes.size() < 2) throw ValidationError("SVM training needs at least two classes");

  model.support = train.x;
  const Eigen::MatrixXd kernel = RbfKernel(train.x, train.x, params.gamma);
  std::vector<int> signs(train.y.size());
  for (int k : model.classes) {
    for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = train.y[i] == k ? 1 : -1;
    model.machines.push_back(SolveBinarySvm(kernel, signs, params));
  }
  // Two classes need one machine; keep both for a uniform argmax.
  return model;
}

Eigen::VectorXd SvmDecision(const SvmModel &model, const Eigen::VectorXd &x) {
  if (x.size() != model.support.cols())
    throw DimensionError("SVM expects " + std::to_string(model.support.cols()) +
                         " features, got " + std::to_string(x.size()));
  Eigen::VectorXd k =
      (-model.params.gamma * (model.support.rowwise() - x.transpose()).rowwise().squaredNorm())
          .array()
          .exp();
  Eigen::VectorXd out(model.machines.size());
  for (std::size_t m = 0; m < model.machines.size(); ++m)
    out[m] = model.machines[m].coef.dot(k) - model.machines[m].rho;
  return out;
}

}  // namespace dmtl
