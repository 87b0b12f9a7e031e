// src/baselines/scaler.cc

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

#include "dmtl/baselines/baselines.h"

namespace dmtl {

void LabelledData::Validate() const {
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw DimensionError("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                         std::to_string(y.size()) + ") differ");
  for (int label : y)
    if (label < 0 || label >= kNumSeverityClasses)
      throw ValidationError("label " + std::to_string(label) + " out of range");
  if (!x.allFinite()) throw ValidationError("features contain NaN or Inf");
}

Scaler Scaler::Fit(const Eigen::MatrixXd &train) {
  if (train.rows() == 0) throw ValidationError("cannot fit a scaler on no samples");
  Scaler s;
  const double n = static_cast<double>(train.rows());
  s.mean_ = train.colwise().sum().transpose() / n;
  s.scale_.resize(train.cols());
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    double var = (train.col(j).array() - s.mean_[j]).square().sum() / n;
    bool constant = var <= 1e-24 * (1.0 + s.mean_[j] * s.mean_[j]);
    s.scale_[j] = constant ? 0.0 : std::sqrt(var);
  }
  return s;
}

Eigen::VectorXd Scaler::Transform(const Eigen::VectorXd &v) const {
  if (v.size() != mean_.size())
    throw DimensionError("scaler expects " + std::to_string(mean_.size()) +
                         " features, got " + std::to_string(v.size()));
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j)
    out[j] = scale_[j] > 0.0 ? (v[j] - mean_[j]) / scale_[j] : 0.0;
  return out;
}

Eigen::MatrixXd Scaler::TransformRows(const Eigen::MatrixXd &x) const {
  if (x.cols() != mean_.size())
    throw DimensionError("scaler expects " + std::to_string(mean_.size()) +
                         " features, got " + std::to_string(x.cols()));
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (scale_[j] > 0.0) out.col(j) = (x.col(j).array() - mean_[j]) / scale_[j];
    else out.col(j).setZero();
  }
  return out;
}

nlohmann::json Scaler::ToJson() const {
  return {{"mean", std::vector<double>(mean_.data(), mean_.data() + mean_.size())},
          {"scale", std::vector<double>(scale_.data(), scale_.data() + scale_.size())}};
}

Scaler Scaler::FromJson(const nlohmann::json &j) {
  auto mean = j.at("mean").get<std::vector<double>>();
  auto scale = j.at("scale").get<std::vector<double>>();
  if (mean.size() != scale.size()) throw ValidationError("scaler: mean/scale size mismatch");
  Scaler s;
  s.mean_ = Eigen::Map<Eigen::VectorXd>(mean.data(), mean.size());
  s.scale_ = Eigen::Map<Eigen::VectorXd>(scale.data(), scale.size());
  return s;
}

const char *FamilyName(Family f) {
  switch (f) {
    case Family::kSvm: return "svm";
    case Family::kMlp: return "mlp";
    case Family::kGbdt: return "gbdt";
  }
  return "?";
}

Family ParseFamily(const std::string &s) {
  if (s == "svm") return Family::kSvm;
  if (s == "mlp") return Family::kMlp;
  if (s == "gbdt" || s == "xgboost") return Family::kGbdt;
  throw ValidationError("unknown classifier family '" + s + "' (svm, mlp, gbdt)");
}

}  // namespace dmtl
