// src/features/linguistic.cc

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

#include <algorithm>
#include <cmath>

#include "dmtl/common/error.h"
#include "dmtl/features/features.h"

namespace dmtl {

FeatureVector ExtractLinguistic(const RawAudio &audio,
                                const std::vector<int> &transcript,
                                const FrameConfig &frames,
                                const PauseConfig &pauses) {
  if (transcript.empty()) throw Error("linguistic features need a transcript");
  LldMatrix lld = ExtractLlds(audio, frames);
  const auto count = lld.frames();
  const double duration = audio.duration_seconds();
  const double hop = frames.hop_length;

  // Gate reference: median voiced log-energy, or the loudest frame when
  // nothing is voiced.
  std::vector<double> voiced_energy, voiced_f0;
  double loudest = kLogEnergyFloorDb;
  for (Eigen::Index t = 0; t < count; ++t) {
    loudest = std::max(loudest, lld.values(t, 1));
    if (lld.voiced_mask[t]) {
      voiced_energy.push_back(lld.values(t, 1));
      voiced_f0.push_back(lld.values(t, 0));
    }
  }
  double reference = voiced_energy.empty() ? loudest : Percentile(voiced_energy, 50.0);
  double gate = reference - pauses.gate_db;

  // Each frame owns the interval [t*hop, (t+1)*hop); the last frame owns the
  // remainder of the signal so the intervals tile the whole duration.
  auto owned = [&](Eigen::Index t) {
    double start = t * hop;
    double end = (t + 1 == count) ? duration : (t + 1) * hop;
    return std::max(0.0, end - start);
  };

  std::vector<bool> silent(count);
  for (Eigen::Index t = 0; t < count; ++t) {
    double e = lld.values(t, 1);
    silent[t] = e < gate || e <= kLogEnergyFloorDb + 1e-9;
  }

  double pause_time = 0.0;
  int pause_count = 0;
  std::vector<double> segments;  // speech stretches between pauses
  double speech_run = 0.0;
  Eigen::Index t = 0;
  while (t < count) {
    Eigen::Index end = t;
    double span = 0.0;
    while (end < count && silent[end] == silent[t]) span += owned(end++);
    bool is_pause = silent[t] && span >= pauses.min_pause_seconds - 1e-9;
    if (is_pause) {
      pause_time += span;
      ++pause_count;
      if (speech_run > 0.0) segments.push_back(speech_run);
      speech_run = 0.0;
    } else {
      speech_run += span;
    }
    t = end;
  }
  if (speech_run > 0.0) segments.push_back(speech_run);

  const double tokens = static_cast<double>(transcript.size());
  double speech_time = std::max(0.0, duration - pause_time);
  bool articulation_valid = speech_time > 1e-9;

  double pitch_mean = 0.0, pitch_range = 0.0, pitch_std = 0.0;
  if (!voiced_f0.empty()) {
    for (double f : voiced_f0) pitch_mean += f;
    pitch_mean /= static_cast<double>(voiced_f0.size());
    auto [lo, hi] = std::minmax_element(voiced_f0.begin(), voiced_f0.end());
    pitch_range = *hi - *lo;
    double var = 0.0;
    for (double f : voiced_f0) var += (f - pitch_mean) * (f - pitch_mean);
    pitch_std = std::sqrt(var / static_cast<double>(voiced_f0.size()));
  }

  double rhythm = 0.0;
  if (!segments.empty()) {
    double mean = 0.0;
    for (double s : segments) mean += s;
    mean /= static_cast<double>(segments.size());
    double var = 0.0;
    for (double s : segments) var += (s - mean) * (s - mean);
    rhythm = std::sqrt(var / static_cast<double>(segments.size()));
  }

  FeatureVector out;
  out.set_id = FeatureSetId::kLinguistic;
  out.names = {"duration_s",   "speaking_rate",  "articulation_rate",
               "articulation_valid", "pause_ratio", "pause_count",
               "pitch_mean_hz", "pitch_range_hz", "pitch_std_hz",
               "pitch_valid",  "rhythm_variability_s"};
  out.values = {duration,
                tokens / duration,
                articulation_valid ? tokens / speech_time : 0.0,
                articulation_valid ? 1.0 : 0.0,
                std::min(1.0, pause_time / duration),
                static_cast<double>(pause_count),
                pitch_mean,
                pitch_range,
                pitch_std,
                voiced_f0.empty() ? 0.0 : 1.0,
                rhythm};
  out.Validate();
  return out;
}

}  // namespace dmtl
