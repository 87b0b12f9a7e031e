// include/dmtl/cli/synth.h

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

#ifndef DMTL_CLI_SYNTH_H_
#define DMTL_CLI_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dmtl/corpus/manifest.h"

namespace dmtl {

// Synthetic stand-in corpus. Each text is a fixed token sequence; each token
// is a harmonic segment whose spectral envelope peaks at a token-specific
// formant. Severity scales tempo, additive noise, spectral tilt, pitch jitter
// and token-to-token gain spread, all monotonically.
struct SynthConfig {
  std::uint64_t seed = 0;
  int speakers = 50;  // spread evenly over the five classes, >= 5 per class
  int sample_rate = 16000;
  int repetitions = 2;
};

inline constexpr int kSynthVocabularySize = 8;
inline constexpr int kSynthTexts = 5;

// Token ids of text t (1-based).
const std::vector<int> &SynthText(int text_id);

struct SynthCorpus {
  std::vector<SpeakerRecord> roster;
  std::vector<Utterance> utterances;  // audio filled, audio_path relative
};

SynthCorpus GenerateSynthCorpus(const SynthConfig &config);

// Writes roster.jsonl, manifest.jsonl and audio/*.wav under dir.
void WriteSynthCorpus(const std::string &dir, const SynthCorpus &corpus,
                      int sample_rate);

// Per-severity mean of the within-utterance variance of frame energy
// (mean square over 25 ms frames, 10 ms hop).
std::vector<double> FrameEnergyVarianceBySeverity(const SynthCorpus &corpus);

}  // namespace dmtl

#endif  // DMTL_CLI_SYNTH_H_
