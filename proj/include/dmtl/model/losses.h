// include/dmtl/model/losses.h

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

#ifndef DMTL_MODEL_LOSSES_H_
#define DMTL_MODEL_LOSSES_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dmtl/common/error.h"

namespace dmtl {

// Numerically stable log-softmax of a vector / of every row of a matrix.
Eigen::VectorXd LogSoftmax(const Eigen::VectorXd &logits);
Eigen::MatrixXd LogSoftmaxRows(const Eigen::MatrixXd &logits);
Eigen::VectorXd Softmax(const Eigen::VectorXd &logits);

// -log softmax(logits)[label], evaluated as logsumexp(logits) - logits[label].
double CrossEntropyFromLogits(const Eigen::VectorXd &logits, int label);
// -log p[label] for an explicit distribution.
double CrossEntropy(const Eigen::VectorXd &probs, int label);

inline constexpr int kCtcBlank = 0;

// Raised when a target cannot be aligned to the available frames.
class CtcAlignmentError : public Error {
 public:
  using Error::Error;
};

// Frames needed to emit the target: its length plus one blank between every
// pair of equal neighbours.
int MinimumCtcFrames(std::span<const int> target);

struct CtcResult {
  double loss = 0.0;
  // d loss / d logits, valid when log_probs = LogSoftmaxRows(logits).
  Eigen::MatrixXd grad_logits;
};

// CTC negative log-likelihood of `target` (labels in 1..V'-1, blank = 0)
// under per-frame log-probabilities (T x V'), via the log-space
// forward-backward recursions.
CtcResult CtcForwardBackward(const Eigen::MatrixXd &log_probs,
                             std::span<const int> target,
                             bool want_gradient = true);

// Loss only, from a row-stochastic probability matrix.
double CtcLoss(const Eigen::MatrixXd &probs, std::span<const int> target);

// Best-path decoding: per-frame argmax, merge repeats, drop blanks.
std::vector<int> GreedyDecode(const Eigen::MatrixXd &probs);

struct LossBundle {
  double ce = 0.0;
  double ctc = 0.0;
  double alpha = 0.0;
  int warmup_epochs = 0;
  int epoch = 0;  // 0-based
  double combined = 0.0;

  // False during warmup, when the classification term is gated off.
  bool ce_enabled() const { return epoch >= warmup_epochs; }
};

// combined = alpha * ctc during warmup (epoch < warmup_epochs), otherwise
// ce + alpha * ctc.
LossBundle CombinedLoss(double ce, double ctc, double alpha, int epoch,
                        int warmup_epochs);

}  // namespace dmtl

#endif  // DMTL_MODEL_LOSSES_H_
