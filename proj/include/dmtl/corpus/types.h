// include/dmtl/corpus/types.h

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

#ifndef DMTL_CORPUS_TYPES_H_
#define DMTL_CORPUS_TYPES_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dmtl {

inline constexpr int kNumSeverityClasses = 5;

enum class Gender { kMale, kFemale };

// "M" / "F".
const char *GenderCode(Gender g);
Gender ParseGender(const std::string &code);  // throws Error

struct SpeakerRecord {
  std::string speaker_id;
  Gender gender = Gender::kMale;
  int severity = 0;  // 0 = healthy ... 4 = severe
};

struct RawAudio {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  // Throws ValidationError unless L >= 1, rate > 0 and every sample in [-1, 1].
  void Validate() const;
};

struct Utterance {
  std::string utterance_id;
  std::string speaker_id;
  std::string audio_path;         // as written in the manifest
  std::vector<int> transcript;    // vocabulary token ids
  int text_id = 1;                // 1..5
  int repetition = 1;             // 1..2
  std::optional<RawAudio> audio;  // filled on eager load
};

enum class Partition { kTrain, kValid, kTest };
inline constexpr std::array<Partition, 3> kAllPartitions = {
    Partition::kTrain, Partition::kValid, Partition::kTest};

const char *PartitionName(Partition p);  // "train" / "valid" / "test"
Partition ParsePartition(const std::string &name);

using SplitAssignment = std::map<std::string, Partition>;

struct CellKey {
  int severity = 0;
  Gender gender = Gender::kMale;
  auto operator<=>(const CellKey &) const = default;
};

struct CellCounts {
  int train = 0;
  int valid = 0;
  int test = 0;
  int total() const { return train + valid + test; }
  int &operator[](Partition p);
  int operator[](Partition p) const;
  bool operator==(const CellCounts &) const = default;
};

using SplitPlan = std::map<CellKey, CellCounts>;

std::string CellName(const CellKey &cell);  // e.g. "severity=1/F"

}  // namespace dmtl

#endif  // DMTL_CORPUS_TYPES_H_
