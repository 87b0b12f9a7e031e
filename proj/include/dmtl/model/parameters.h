// include/dmtl/model/parameters.h

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

#ifndef DMTL_MODEL_PARAMETERS_H_
#define DMTL_MODEL_PARAMETERS_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dmtl {

struct NamedTensor {
  std::string name;
  Eigen::MatrixXd value;
};

// Ordered collection of named tensors. Model parameters, their gradients and
// optimizer moments all share this layout.
class ParameterSet {
 public:
  // Returns the index of the new tensor.
  std::size_t Add(const std::string &name, Eigen::MatrixXd value);

  std::size_t size() const { return tensors_.size(); }
  Eigen::MatrixXd &operator[](std::size_t i) { return tensors_[i].value; }
  const Eigen::MatrixXd &operator[](std::size_t i) const { return tensors_[i].value; }
  const std::string &name(std::size_t i) const { return tensors_[i].name; }
  const std::vector<NamedTensor> &tensors() const { return tensors_; }

  // Throws Error if absent.
  std::size_t Index(const std::string &name) const;
  bool Contains(const std::string &name) const;

  // Same names and shapes, all zero.
  ParameterSet ZerosLike() const;
  void SetZero();
  void Scale(double factor);
  // Elementwise this += other; shapes must match.
  void Add(const ParameterSet &other);
  double SquaredNorm() const;
  long long NumElements() const;
  bool AllFinite() const;
  bool SameLayout(const ParameterSet &other) const;
  bool operator==(const ParameterSet &other) const;

 private:
  std::vector<NamedTensor> tensors_;
};

}  // namespace dmtl

#endif  // DMTL_MODEL_PARAMETERS_H_
