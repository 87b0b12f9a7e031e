// src/model/losses.cc

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

#include "dmtl/model/losses.h"

#include <cmath>
#include <limits>

namespace dmtl {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

Eigen::VectorXd LogSoftmax(const Eigen::VectorXd &logits) {
  double m = logits.maxCoeff();
  double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

Eigen::MatrixXd LogSoftmaxRows(const Eigen::MatrixXd &logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    double m = logits.row(t).maxCoeff();
    double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

Eigen::VectorXd Softmax(const Eigen::VectorXd &logits) {
  return LogSoftmax(logits).array().exp();
}

double CrossEntropyFromLogits(const Eigen::VectorXd &logits, int label) {
  if (label < 0 || label >= logits.size())
    throw DimensionError("label out of range for logits");
  return -LogSoftmax(logits)[label];
}

double CrossEntropy(const Eigen::VectorXd &probs, int label) {
  if (label < 0 || label >= probs.size())
    throw DimensionError("label out of range for distribution");
  return -std::log(probs[label]);
}

int MinimumCtcFrames(std::span<const int> target) {
  int frames = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++frames;
  return frames;
}

CtcResult CtcForwardBackward(const Eigen::MatrixXd &log_probs,
                             std::span<const int> target, bool want_gradient) {
  const auto T = log_probs.rows();
  const auto V = log_probs.cols();
  for (int label : target)
    if (label <= kCtcBlank || label >= V)
      throw DimensionError("CTC target label " + std::to_string(label) +
                           " outside 1.." + std::to_string(V - 1));
  const int needed = MinimumCtcFrames(target);
  if (T < needed || T < 1)
    throw CtcAlignmentError("CTC target of length " + std::to_string(target.size()) +
                            " needs at least " + std::to_string(std::max(needed, 1)) +
                            " frames, got " + std::to_string(T));

  // Blank-augmented label sequence: blank, l1, blank, l2, ..., blank.
  const auto S = static_cast<Eigen::Index>(2 * target.size() + 1);
  std::vector<int> ext(S, kCtcBlank);
  for (std::size_t u = 0; u < target.size(); ++u) ext[2 * u + 1] = target[u];
  auto can_skip = [&](Eigen::Index s) {
    return s >= 2 && ext[s] != kCtcBlank && ext[s] != ext[s - 2];
  };

  // alpha(t, s): log-probability of all prefixes ending in state s at frame t,
  // emissions up to and including t.
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(T, S, kNegInf);
  alpha(0, 0) = log_probs(0, ext[0]);
  if (S > 1) alpha(0, 1) = log_probs(0, ext[1]);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = LogAdd(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = LogAdd(a, alpha(t - 1, s - 2));
      if (a != kNegInf) alpha(t, s) = a + log_probs(t, ext[s]);
    }
  }
  double log_likelihood = alpha(T - 1, S - 1);
  if (S > 1) log_likelihood = LogAdd(log_likelihood, alpha(T - 1, S - 2));
  if (log_likelihood == kNegInf)
    throw CtcAlignmentError("CTC target has zero probability under the model");

  CtcResult result;
  result.loss = -log_likelihood;
  if (!want_gradient) return result;

  // beta(t, s): log-probability of completing the sequence from state s at
  // frame t, emissions strictly after t.
  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(T, S, kNegInf);
  beta(T - 1, S - 1) = 0.0;
  if (S > 1) beta(T - 1, S - 2) = 0.0;
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      double b = beta(t + 1, s) + log_probs(t + 1, ext[s]);
      if (s + 1 < S) b = LogAdd(b, beta(t + 1, s + 1) + log_probs(t + 1, ext[s + 1]));
      if (s + 2 < S && can_skip(s + 2))
        b = LogAdd(b, beta(t + 1, s + 2) + log_probs(t + 1, ext[s + 2]));
      beta(t, s) = b;
    }
  }

  // Posterior label occupancy; the gradient w.r.t. logits is softmax minus it.
  Eigen::MatrixXd occupancy = Eigen::MatrixXd::Zero(T, V);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index s = 0; s < S; ++s) {
      double lp = alpha(t, s) + beta(t, s);
      if (lp != kNegInf) occupancy(t, ext[s]) += std::exp(lp - log_likelihood);
    }
  result.grad_logits = log_probs.array().exp().matrix() - occupancy;
  return result;
}

double CtcLoss(const Eigen::MatrixXd &probs, std::span<const int> target) {
  return CtcForwardBackward(probs.array().log().matrix(), target, false).loss;
}

std::vector<int> GreedyDecode(const Eigen::MatrixXd &probs) {
  std::vector<int> out;
  int prev = kCtcBlank;
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    Eigen::Index best;
    probs.row(t).maxCoeff(&best);
    int label = static_cast<int>(best);
    if (label != kCtcBlank && label != prev) out.push_back(label);
    prev = label;
  }
  return out;
}

LossBundle CombinedLoss(double ce, double ctc, double alpha, int epoch,
                        int warmup_epochs) {
  LossBundle b;
  b.ce = ce;
  b.ctc = ctc;
  b.alpha = alpha;
  b.epoch = epoch;
  b.warmup_epochs = warmup_epochs;
  b.combined = b.ce_enabled() ? ce + alpha * ctc : alpha * ctc;
  return b;
}

}  // namespace dmtl
