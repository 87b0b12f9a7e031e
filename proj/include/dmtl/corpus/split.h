// include/dmtl/corpus/split.h

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

#ifndef DMTL_CORPUS_SPLIT_H_
#define DMTL_CORPUS_SPLIT_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dmtl/corpus/types.h"

namespace dmtl {

struct SplitRatios {
  double train = 0.6;
  double valid = 0.2;
  double test = 0.2;
};

// Largest-remainder apportionment of n speakers over the three partitions.
// Each partition first gets floor(n * ratio); leftover seats go to the largest
// fractional remainders, ties resolved in the order test, valid, train.
CellCounts AllocateLargestRemainder(int n, const SplitRatios &ratios);

// Speaker-independent split stratified by (severity, gender). Within a cell the
// speakers are ordered by id and shuffled with a seed-derived stream, then the
// first n_train go to train, the next n_valid to valid, the rest to test. When
// a plan is given its counts are used verbatim and must cover every roster
// cell exactly; otherwise counts come from AllocateLargestRemainder.
SplitAssignment MakeSplit(const std::vector<SpeakerRecord> &roster,
                          const SplitRatios &ratios, std::uint64_t seed,
                          const SplitPlan *plan = nullptr);

// Per-cell speaker counts of the roster.
std::map<CellKey, int> CellSizes(const std::vector<SpeakerRecord> &roster);

// Per-cell partition counts realised by an assignment.
SplitPlan RealisedCounts(const std::vector<SpeakerRecord> &roster,
                         const SplitAssignment &assignment);

struct SplitReport {
  std::vector<std::string> violations;
  SplitPlan cell_counts;
  std::array<int, 3> speakers_per_partition{};
  std::array<int, 3> utterances_per_partition{};
  int total_utterances() const {
    return utterances_per_partition[0] + utterances_per_partition[1] +
           utterances_per_partition[2];
  }
};

// One (speaker, partition) pair per entry; a speaker may appear more than
// once here, which is exactly what validation is meant to catch.
using SplitEntries = std::vector<std::pair<std::string, Partition>>;

SplitReport ValidateSplit(const std::vector<SpeakerRecord> &roster,
                          const SplitEntries &entries,
                          const std::vector<Utterance> &utterances);
SplitReport ValidateSplit(const std::vector<SpeakerRecord> &roster,
                          const SplitAssignment &assignment,
                          const std::vector<Utterance> &utterances);

// Plan file: TSV, header "severity gender n_train n_valid n_test", one line
// per cell.
SplitPlan ReadSplitPlan(const std::string &path);
void WriteSplitPlan(const std::string &path, const SplitPlan &plan);

// Split file: TSV, header "speaker_id partition", one line per speaker.
SplitEntries ReadSplitEntries(const std::string &path);
SplitAssignment ReadSplit(const std::string &path);
void WriteSplit(const std::string &path, const SplitAssignment &assignment);

std::string FormatSplitReport(const SplitReport &report);

}  // namespace dmtl

#endif  // DMTL_CORPUS_SPLIT_H_
