// src/corpus/split.cc

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

#include "dmtl/corpus/split.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dmtl/common/error.h"
#include "dmtl/common/rng.h"
#include "dmtl/common/strings.h"

namespace dmtl {

CellCounts AllocateLargestRemainder(int n, const SplitRatios &ratios) {
  if (n < 0) throw Error("negative cell size");
  const double r[3] = {ratios.train, ratios.valid, ratios.test};
  double sum = r[0] + r[1] + r[2];
  if (r[0] < 0 || r[1] < 0 || r[2] < 0 || std::fabs(sum - 1.0) > 1e-9)
    throw Error("split ratios must be non-negative and sum to 1");

  int seats[3];
  double remainder[3];
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double quota = n * r[i];
    // Snap values that are integral up to rounding noise (e.g. 10 * 0.6).
    double snapped = std::round(quota);
    if (std::fabs(quota - snapped) < 1e-9) quota = snapped;
    seats[i] = static_cast<int>(std::floor(quota));
    remainder[i] = quota - seats[i];
    assigned += seats[i];
  }
  // Priority order for equal remainders: test, valid, train.
  const int order[3] = {2, 1, 0};
  for (int left = n - assigned; left > 0; --left) {
    int best = -1;
    for (int idx : order) {
      if (best < 0 || remainder[idx] > remainder[best] + 1e-9) best = idx;
    }
    ++seats[best];
    remainder[best] = -1.0;
  }
  return CellCounts{seats[0], seats[1], seats[2]};
}

std::map<CellKey, int> CellSizes(const std::vector<SpeakerRecord> &roster) {
  std::map<CellKey, int> sizes;
  for (const auto &s : roster) ++sizes[CellKey{s.severity, s.gender}];
  return sizes;
}

SplitAssignment MakeSplit(const std::vector<SpeakerRecord> &roster,
                          const SplitRatios &ratios, std::uint64_t seed,
                          const SplitPlan *plan) {
  std::map<CellKey, std::vector<std::string>> cells;
  std::set<std::string> ids;
  for (const auto &s : roster) {
    if (!ids.insert(s.speaker_id).second)
      throw ValidationError("duplicate speaker_id '" + s.speaker_id + "'");
    cells[CellKey{s.severity, s.gender}].push_back(s.speaker_id);
  }

  if (plan) {
    for (const auto &[cell, counts] : *plan) {
      int size = cells.count(cell) ? static_cast<int>(cells.at(cell).size()) : 0;
      if (counts.train < 0 || counts.valid < 0 || counts.test < 0)
        throw ValidationError("split plan cell " + CellName(cell) +
                              " has negative counts");
      if (counts.total() != size)
        throw ValidationError("split plan cell " + CellName(cell) + " sums to " +
                              std::to_string(counts.total()) +
                              " but the roster has " + std::to_string(size) +
                              " speakers");
    }
    for (const auto &[cell, members] : cells) {
      if (!plan->count(cell))
        throw ValidationError("split plan has no entry for roster cell " +
                              CellName(cell));
    }
  }

  SplitAssignment assignment;
  for (auto &[cell, members] : cells) {
    CellCounts counts = plan ? plan->at(cell)
                             : AllocateLargestRemainder(
                                   static_cast<int>(members.size()), ratios);
    std::sort(members.begin(), members.end());
    Rng rng(DeriveSeed(seed, "split",
                       static_cast<std::uint64_t>(cell.severity) * 2 +
                           (cell.gender == Gender::kFemale ? 1 : 0)));
    Shuffle(members.begin(), members.end(), rng);
    std::size_t i = 0;
    for (Partition p : kAllPartitions) {
      for (int k = 0; k < counts[p]; ++k) assignment[members[i++]] = p;
    }
  }
  return assignment;
}

SplitPlan RealisedCounts(const std::vector<SpeakerRecord> &roster,
                         const SplitAssignment &assignment) {
  SplitPlan counts;
  for (const auto &s : roster) {
    CellCounts &c = counts[CellKey{s.severity, s.gender}];
    auto it = assignment.find(s.speaker_id);
    if (it != assignment.end()) ++c[it->second];
  }
  return counts;
}

SplitReport ValidateSplit(const std::vector<SpeakerRecord> &roster,
                          const SplitEntries &entries,
                          const std::vector<Utterance> &utterances) {
  SplitReport report;
  std::map<std::string, std::set<Partition>> seen;
  std::set<std::string> roster_ids;
  for (const auto &s : roster) roster_ids.insert(s.speaker_id);
  for (const auto &[speaker, partition] : entries) {
    if (!roster_ids.count(speaker))
      report.violations.push_back("speaker '" + speaker + "' is not in the roster");
    seen[speaker].insert(partition);
  }
  for (const auto &[speaker, parts] : seen) {
    if (parts.size() > 1) {
      std::string names;
      for (Partition p : parts) names += std::string(names.empty() ? "" : ",") + PartitionName(p);
      report.violations.push_back("speaker '" + speaker +
                                  "' appears in several partitions: " + names);
    }
  }
  for (const auto &s : roster) {
    auto it = seen.find(s.speaker_id);
    if (it == seen.end()) {
      report.violations.push_back("speaker '" + s.speaker_id + "' is unassigned");
      continue;
    }
    Partition p = *it->second.begin();
    ++report.cell_counts[CellKey{s.severity, s.gender}][p];
    ++report.speakers_per_partition[static_cast<int>(p)];
  }
  for (const auto &u : utterances) {
    auto it = seen.find(u.speaker_id);
    if (it == seen.end()) continue;
    ++report.utterances_per_partition[static_cast<int>(*it->second.begin())];
  }
  return report;
}

SplitReport ValidateSplit(const std::vector<SpeakerRecord> &roster,
                          const SplitAssignment &assignment,
                          const std::vector<Utterance> &utterances) {
  SplitEntries entries(assignment.begin(), assignment.end());
  return ValidateSplit(roster, entries, utterances);
}

namespace {

template <typename Fn>
void ForEachTsvLine(const std::string &path, std::size_t min_fields, Fn &&fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = SplitWhitespace(t);
    if (header) {
      header = false;
      continue;
    }
    if (fields.size() != min_fields)
      throw ParseError(path, lineno, "expected " + std::to_string(min_fields) +
                                         " fields, got " +
                                         std::to_string(fields.size()));
    fn(fields, lineno);
  }
}

}  // namespace

SplitPlan ReadSplitPlan(const std::string &path) {
  SplitPlan plan;
  ForEachTsvLine(path, 5, [&](const std::vector<std::string> &f, std::size_t lineno) {
    long long sev, n[3];
    if (!ParseInt(f[0], &sev) || sev < 0 || sev >= kNumSeverityClasses)
      throw ParseError(path, lineno, "invalid severity '" + f[0] + "'");
    Gender g;
    try {
      g = ParseGender(f[1]);
    } catch (const Error &e) {
      throw ParseError(path, lineno, e.what());
    }
    for (int i = 0; i < 3; ++i) {
      if (!ParseInt(f[2 + i], &n[i]) || n[i] < 0)
        throw ParseError(path, lineno, "invalid count '" + f[2 + i] + "'");
    }
    CellKey key{static_cast<int>(sev), g};
    if (plan.count(key))
      throw ParseError(path, lineno, "duplicate cell " + CellName(key));
    plan[key] = CellCounts{static_cast<int>(n[0]), static_cast<int>(n[1]),
                           static_cast<int>(n[2])};
  });
  return plan;
}

void WriteSplitPlan(const std::string &path, const SplitPlan &plan) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "severity\tgender\tn_train\tn_valid\tn_test\n";
  for (const auto &[cell, c] : plan)
    out << cell.severity << '\t' << GenderCode(cell.gender) << '\t' << c.train
        << '\t' << c.valid << '\t' << c.test << '\n';
}

SplitEntries ReadSplitEntries(const std::string &path) {
  SplitEntries entries;
  ForEachTsvLine(path, 2, [&](const std::vector<std::string> &f, std::size_t lineno) {
    try {
      entries.emplace_back(f[0], ParsePartition(f[1]));
    } catch (const Error &e) {
      throw ParseError(path, lineno, e.what());
    }
  });
  return entries;
}

SplitAssignment ReadSplit(const std::string &path) {
  SplitAssignment assignment;
  for (const auto &[speaker, p] : ReadSplitEntries(path)) {
    if (!assignment.emplace(speaker, p).second)
      throw ValidationError(path + ": speaker '" + speaker + "' listed twice");
  }
  return assignment;
}

void WriteSplit(const std::string &path, const SplitAssignment &assignment) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "speaker_id\tpartition\n";
  for (const auto &[speaker, p] : assignment)
    out << speaker << '\t' << PartitionName(p) << '\n';
}

std::string FormatSplitReport(const SplitReport &report) {
  std::ostringstream os;
  os << "violations\t" << report.violations.size() << '\n';
  for (const auto &v : report.violations) os << "violation\t" << v << '\n';
  for (Partition p : kAllPartitions) {
    int i = static_cast<int>(p);
    os << "partition\t" << PartitionName(p) << "\tspeakers\t"
       << report.speakers_per_partition[i] << "\tutterances\t"
       << report.utterances_per_partition[i] << '\n';
  }
  for (const auto &[cell, c] : report.cell_counts)
    os << "cell\t" << cell.severity << '\t' << GenderCode(cell.gender) << '\t'
       << c.train << '\t' << c.valid << '\t' << c.test << '\n';
  return os.str();
}

}  // namespace dmtl
