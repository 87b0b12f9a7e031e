// src/model/parameters.cc

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

#include "dmtl/model/parameters.h"

#include "dmtl/common/error.h"

namespace dmtl {

std::size_t ParameterSet::Add(const std::string &name, Eigen::MatrixXd value) {
  if (Contains(name)) throw Error("duplicate parameter '" + name + "'");
  tensors_.push_back({name, std::move(value)});
  return tensors_.size() - 1;
}

std::size_t ParameterSet::Index(const std::string &name) const {
  for (std::size_t i = 0; i < tensors_.size(); ++i)
    if (tensors_[i].name == name) return i;
  throw Error("no parameter named '" + name + "'");
}

bool ParameterSet::Contains(const std::string &name) const {
  for (const auto &t : tensors_)
    if (t.name == name) return true;
  return false;
}

ParameterSet ParameterSet::ZerosLike() const {
  ParameterSet out;
  for (const auto &t : tensors_)
    out.tensors_.push_back({t.name, Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols())});
  return out;
}

void ParameterSet::SetZero() {
  for (auto &t : tensors_) t.value.setZero();
}

void ParameterSet::Scale(double factor) {
  for (auto &t : tensors_) t.value *= factor;
}

void ParameterSet::Add(const ParameterSet &other) {
  if (!SameLayout(other)) throw DimensionError("parameter layouts differ");
  for (std::size_t i = 0; i < tensors_.size(); ++i) tensors_[i].value += other.tensors_[i].value;
}

double ParameterSet::SquaredNorm() const {
  double s = 0.0;
  for (const auto &t : tensors_) s += t.value.squaredNorm();
  return s;
}

long long ParameterSet::NumElements() const {
  long long n = 0;
  for (const auto &t : tensors_) n += t.value.size();
  return n;
}

bool ParameterSet::AllFinite() const {
  for (const auto &t : tensors_)
    if (!t.value.allFinite()) return false;
  return true;
}

bool ParameterSet::SameLayout(const ParameterSet &other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const auto &a = tensors_[i], &b = other.tensors_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols())
      return false;
  }
  return true;
}

bool ParameterSet::operator==(const ParameterSet &other) const {
  if (!SameLayout(other)) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i)
    if (tensors_[i].value != other.tensors_[i].value) return false;
  return true;
}

}  // namespace dmtl
