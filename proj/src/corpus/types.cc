// src/corpus/types.cc

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

#include "dmtl/corpus/types.h"

#include <cmath>

#include "dmtl/common/error.h"

namespace dmtl {

const char *GenderCode(Gender g) { return g == Gender::kMale ? "M" : "F"; }

Gender ParseGender(const std::string &code) {
  if (code == "M" || code == "m") return Gender::kMale;
  if (code == "F" || code == "f") return Gender::kFemale;
  throw Error("invalid gender '" + code + "' (expected M or F)");
}

void RawAudio::Validate() const {
  if (sample_rate <= 0) throw ValidationError("sample rate must be positive");
  if (samples.empty()) throw ValidationError("audio has no samples");
  for (double s : samples) {
    if (!std::isfinite(s) || s < -1.0 || s > 1.0)
      throw ValidationError("audio sample outside [-1, 1]");
  }
}

const char *PartitionName(Partition p) {
  switch (p) {
    case Partition::kTrain: return "train";
    case Partition::kValid: return "valid";
    case Partition::kTest: return "test";
  }
  return "?";
}

Partition ParsePartition(const std::string &name) {
  if (name == "train") return Partition::kTrain;
  if (name == "valid") return Partition::kValid;
  if (name == "test") return Partition::kTest;
  throw Error("invalid partition '" + name + "'");
}

int &CellCounts::operator[](Partition p) {
  switch (p) {
    case Partition::kTrain: return train;
    case Partition::kValid: return valid;
    default: return test;
  }
}

int CellCounts::operator[](Partition p) const {
  return const_cast<CellCounts &>(*this)[p];
}

std::string CellName(const CellKey &cell) {
  return "severity=" + std::to_string(cell.severity) + "/" +
         GenderCode(cell.gender);
}

}  // namespace dmtl
