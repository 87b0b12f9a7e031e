// include/dmtl/features/features.h

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

#ifndef DMTL_FEATURES_FEATURES_H_
#define DMTL_FEATURES_FEATURES_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmtl/corpus/types.h"

namespace dmtl {

enum class FeatureSetId { kAcoustic, kLinguistic, kCombined };
const char *FeatureSetName(FeatureSetId id);
FeatureSetId ParseFeatureSet(const std::string &name);

struct FeatureVector {
  std::vector<double> values;
  std::vector<std::string> names;
  FeatureSetId set_id = FeatureSetId::kAcoustic;

  std::size_t size() const { return values.size(); }
  // Throws unless names and values agree in length and every value is finite.
  void Validate() const;
};

// Which frames a descriptor's functionals are computed over.
enum class FrameScope {
  kAll,          // every frame
  kVoiced,       // frames with voiced_mask set
  kVoicedPairs,  // frames whose predecessor is voiced as well
};

struct LldMatrix {
  Eigen::MatrixXd values;  // frames x descriptors
  std::vector<std::string> descriptor_names;
  std::vector<FrameScope> scopes;  // one per descriptor
  std::vector<bool> voiced_mask;   // one per frame
  double frame_length = 0.025;
  double hop_length = 0.010;
  int sample_rate = 16000;

  Eigen::Index frames() const { return values.rows(); }
};

struct FrameConfig {
  double frame_length = 0.025;  // seconds
  double hop_length = 0.010;
  double pre_emphasis = 0.97;
  double min_f0 = 60.0;           // Hz, voicing search band
  double max_f0 = 400.0;
  double voicing_threshold = 0.3;  // normalized autocorrelation peak
  int num_mel_filters = 26;
  int num_cepstra = 13;
};

// Frames of round(frame_length * rate) samples every round(hop_length * rate)
// samples; a trailing partial frame is dropped. Returns frames x frame_size.
Eigen::MatrixXd FrameSignal(const RawAudio &audio, double frame_length,
                            double hop_length);

// Silence floor of the frame log-energy descriptor, in dB.
inline constexpr double kLogEnergyFloorDb = -100.0;

// Per-frame descriptors, in column order:
//   f0_hz, log_energy_db, jitter_rel, shimmer_rel, spectral_centroid_hz,
//   spectral_flux, zcr, mfcc_0 .. mfcc_12.
// Unvoiced frames carry f0 = 0. jitter and shimmer are defined on consecutive
// voiced frames only.
LldMatrix ExtractLlds(const RawAudio &audio, const FrameConfig &config = {});

// Autocorrelation pitch of one frame. Returns 0 for unvoiced frames and sets
// *peak to the normalized autocorrelation peak when given.
double EstimateF0(const double *frame, int size, int sample_rate,
                  const FrameConfig &config, double *peak = nullptr);

// Per descriptor: mean, std, p20, p50, p80 over the descriptor's frame scope,
// named "<descriptor>_<functional>". Descriptors restricted to voiced frames
// additionally get a "<descriptor>_valid" flag (1 when at least one frame was
// in scope, else 0 and the functionals are 0). Population variance; linearly
// interpolated percentiles.
FeatureVector ApplyFunctionals(const LldMatrix &lld);

// Percentile with linear interpolation between closest ranks, q in [0, 100].
double Percentile(std::vector<double> values, double q);

struct PauseConfig {
  double gate_db = 20.0;         // below median voiced log-energy
  double min_pause_seconds = 0.150;
};

// Rate, pause and pitch statistics in this order:
//   duration_s, speaking_rate, articulation_rate, articulation_valid,
//   pause_ratio, pause_count, pitch_mean_hz, pitch_range_hz, pitch_std_hz,
//   pitch_valid, rhythm_variability_s.
FeatureVector ExtractLinguistic(const RawAudio &audio,
                                const std::vector<int> &transcript,
                                const FrameConfig &frames = {},
                                const PauseConfig &pauses = {});

// a's entries followed by b's. Duplicate names are an error.
FeatureVector CombineFeatures(const FeatureVector &a, const FeatureVector &b);

// Convenience wrapper used by the CLI.
FeatureVector ExtractFeatureSet(FeatureSetId set, const RawAudio &audio,
                                const std::vector<int> &transcript);

struct FeatureTable {
  std::vector<std::string> utterance_ids;
  std::vector<FeatureVector> rows;
};

// Header: "utterance_id set_id <names...>"; then one tab-separated line per
// utterance with values at full round-trip precision.
void WriteFeatureTable(const std::string &path, const FeatureTable &table);
FeatureTable ReadFeatureTable(const std::string &path);

}  // namespace dmtl

#endif  // DMTL_FEATURES_FEATURES_H_
