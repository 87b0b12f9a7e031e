// tests/unit/model_oracles.h

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

#ifndef DMTL_TESTS_MODEL_ORACLES_H_
#define DMTL_TESTS_MODEL_ORACLES_H_

// Test-only reference implementations; none of them share code with the
// library paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmtl/common/rng.h"
#include "dmtl/model/mtl_model.h"

namespace dmtl::testing {

// Collapse a frame path: merge repeats, then drop blanks (label 0).
inline std::vector<int> CollapsePath(const std::vector<int> &path) {
  std::vector<int> out;
  int prev = -1;
  for (int p : path) {
    if (p != prev && p != 0) out.push_back(p);
    prev = p;
  }
  return out;
}

// Sum over every length-T path that collapses to the target.
inline double BruteForceCtcProbability(const Eigen::MatrixXd &probs,
                                       const std::vector<int> &target) {
  const int T = static_cast<int>(probs.rows()), V = static_cast<int>(probs.cols());
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    if (CollapsePath(path) == target) {
      double p = 1.0;
      for (int t = 0; t < T; ++t) p *= probs(t, path[t]);
      total += p;
    }
    int t = 0;
    while (t < T && ++path[t] == V) path[t++] = 0;
    if (t == T) break;
  }
  return total;
}

// Most probable single path, collapsed.
inline std::vector<int> BruteForceBestPath(const Eigen::MatrixXd &probs) {
  const int T = static_cast<int>(probs.rows()), V = static_cast<int>(probs.cols());
  std::vector<int> path(T, 0), best;
  double best_p = -1.0;
  while (true) {
    double p = 1.0;
    for (int t = 0; t < T; ++t) p *= probs(t, path[t]);
    if (p > best_p) {
      best_p = p;
      best = path;
    }
    int t = 0;
    while (t < T && ++path[t] == V) path[t++] = 0;
    if (t == T) break;
  }
  return CollapsePath(best);
}

inline Eigen::MatrixXd RandomRowStochastic(Rng &rng, int T, int V) {
  Eigen::MatrixXd m(T, V);
  for (int t = 0; t < T; ++t) {
    for (int v = 0; v < V; ++v) m(t, v) = 0.05 + UniformUnit(rng);
    m.row(t) /= m.row(t).sum();
  }
  return m;
}

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  long long checked = 0;
};

// Central differences of `loss` with respect to every entry of `params`,
// compared against `analytic`. Relative error is |a - n| / max(|a|, |n|, floor).
inline GradientCheckResult CheckGradients(ParameterSet &params, const ParameterSet &analytic,
                                          const std::function<double()> &loss,
                                          double step = 1e-6, double floor = 1e-4) {
  GradientCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::MatrixXd &p = params[i];
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        double saved = p(r, c);
        p(r, c) = saved + step;
        double up = loss();
        p(r, c) = saved - step;
        double down = loss();
        p(r, c) = saved;
        double numeric = (up - down) / (2.0 * step);
        double a = analytic[i](r, c);
        double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
        double rel = std::fabs(a - numeric) / denom;
        ++result.checked;
        if (rel > result.max_relative_error) {
          result.max_relative_error = rel;
          result.worst_parameter = params.name(i);
        }
      }
  }
  return result;
}

// Small toy encoder that keeps finite-difference checks fast.
inline ModelConfig TinyModelConfig(std::uint64_t seed = 1) {
  ModelConfig c;
  c.encoder.feature_dim = 8;
  c.encoder.conv1_kernel = 6;
  c.encoder.conv1_stride = 3;
  c.encoder.conv1_channels = 4;
  c.encoder.conv2_kernel = 4;
  c.encoder.conv2_stride = 4;
  c.encoder.attention_blocks = 2;
  c.encoder.ffn_dim = 12;
  c.encoder.seed = seed;
  c.vocabulary = {"a", "b", "c"};
  c.seed = seed + 100;
  return c;
}

inline RawAudio NoiseAudio(std::uint64_t seed, std::size_t n, double amp = 0.9) {
  Rng rng(seed);
  RawAudio a;
  a.sample_rate = 16000;
  for (std::size_t i = 0; i < n; ++i) a.samples.push_back(Uniform(rng, -amp, amp));
  return a;
}

}  // namespace dmtl::testing

#endif  // DMTL_TESTS_MODEL_ORACLES_H_
