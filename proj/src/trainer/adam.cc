// src/trainer/adam.cc

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

#include "dmtl/trainer/trainer.h"

namespace dmtl {

AdamState InitAdam(const ParameterSet &params) {
  AdamState s;
  s.m = params.ZerosLike();
  s.v = params.ZerosLike();
  return s;
}

void AdamStep(ParameterSet &params, const ParameterSet &grads, AdamState &state,
              const TrainConfig &config) {
  if (!grads.SameLayout(params) || !state.m.SameLayout(params) ||
      !state.v.SameLayout(params))
    throw DimensionError("Adam: parameter, gradient and moment layouts differ");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!grads[i].allFinite())
      throw TrainingError("non-finite gradient in " + grads.name(i));

  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::MatrixXd &m = state.m[i];
    Eigen::MatrixXd &v = state.v[i];
    const Eigen::MatrixXd &g = grads[i];
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    params[i].array() -=
        config.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config.eps);
  }
}

double ClipGlobalNorm(ParameterSet &grads, double max_norm) {
  const double norm = std::sqrt(grads.SquaredNorm());
  if (max_norm > 0.0 && norm > max_norm) grads.Scale(max_norm / norm);
  return norm;
}

}  // namespace dmtl
